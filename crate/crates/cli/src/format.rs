//! Plain-text energy files.
//!
//! ```text
//! # comment
//! BPBE 1
//! vars <N>
//! constant <real>
//! unary <K>
//! <p> <u_p>            (K lines)
//! pairwise <L>
//! <p> <q> <w_pq>       (L lines, p < q)
//! ```
//!
//! On read, repeated entries are summed and a diagonal pair `p p w` is
//! folded into the unary of `p`. Reals are written in Rust's shortest
//! round-trip form, so write → read reproduces every coefficient exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use lsa_core::{BinaryEnergy, EnergyBuilder};
use thiserror::Error;

pub const MAGIC: &str = "BPBE";
pub const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unexpected end of file: {0}")]
    Eof(&'static str),
    #[error(transparent)]
    Energy(#[from] lsa_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    /// Next non-empty line with comments removed, split into tokens.
    fn next_tokens(&mut self, what: &'static str) -> Result<(usize, Vec<&'a str>), FormatError> {
        for (k, raw) in self.inner.by_ref() {
            let content = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = content.split_whitespace().collect();
            if !tokens.is_empty() {
                return Ok((k + 1, tokens));
            }
        }
        Err(FormatError::Eof(what))
    }

    fn keyword<T: FromStr>(&mut self, key: &'static str) -> Result<T, FormatError> {
        let (line, tokens) = self.next_tokens(key)?;
        match tokens.as_slice() {
            [k, v] if *k == key => parse(v, line),
            _ => Err(syntax(line, format!("expected `{key} <value>`"))),
        }
    }
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax { line, message: message.into() }
}

fn parse<T: FromStr>(token: &str, line: usize) -> Result<T, FormatError> {
    token.parse().map_err(|_| syntax(line, format!("cannot parse `{token}`")))
}

pub fn parse_energy(text: &str) -> Result<BinaryEnergy, FormatError> {
    let mut lines = Lines { inner: text.lines().enumerate() };

    let (line, header) = lines.next_tokens("header")?;
    match header.as_slice() {
        [magic, version] if *magic == MAGIC => {
            let v: u32 = parse(version, line)?;
            if v != VERSION {
                return Err(syntax(line, format!("unsupported version {v}")));
            }
        }
        _ => return Err(syntax(line, format!("expected `{MAGIC} {VERSION}` header"))),
    }

    let num_vars: usize = lines.keyword("vars")?;
    let constant: f64 = lines.keyword("constant")?;
    let mut builder = EnergyBuilder::new(num_vars);
    builder.add_constant(constant);

    let num_unary: usize = lines.keyword("unary")?;
    for _ in 0..num_unary {
        let (line, tokens) = lines.next_tokens("unary entry")?;
        let [p, u] = tokens.as_slice() else {
            return Err(syntax(line, "expected `<p> <u_p>`"));
        };
        builder.add_unary(parse(p, line)?, parse(u, line)?).map_err(|e| syntax(line, e.to_string()))?;
    }

    let num_pairs: usize = lines.keyword("pairwise")?;
    for _ in 0..num_pairs {
        let (line, tokens) = lines.next_tokens("pairwise entry")?;
        let [p, q, w] = tokens.as_slice() else {
            return Err(syntax(line, "expected `<p> <q> <w_pq>`"));
        };
        builder
            .add_pairwise(parse(p, line)?, parse(q, line)?, parse(w, line)?)
            .map_err(|e| syntax(line, e.to_string()))?;
    }

    if let Ok((line, _)) = lines.next_tokens("trailing") {
        return Err(syntax(line, "unexpected content after pairwise block"));
    }
    Ok(builder.build()?)
}

/// Serializes an energy. Zero unaries are omitted.
pub fn format_energy(e: &BinaryEnergy) -> String {
    let mut out = String::new();
    let unary: Vec<(usize, f64)> = e.unary().iter().copied().enumerate().filter(|&(_, u)| u != 0.0).collect();
    writeln!(out, "{MAGIC} {VERSION}").unwrap();
    writeln!(out, "vars {}", e.num_vars()).unwrap();
    writeln!(out, "constant {:?}", e.constant()).unwrap();
    writeln!(out, "unary {}", unary.len()).unwrap();
    for (p, u) in unary {
        writeln!(out, "{p} {u:?}").unwrap();
    }
    writeln!(out, "pairwise {}", e.pairs().len()).unwrap();
    for pair in e.pairs() {
        writeln!(out, "{} {} {:?}", pair.p, pair.q, pair.w).unwrap();
    }
    out
}

pub fn read_energy(path: &Path) -> Result<BinaryEnergy, FormatError> {
    parse_energy(&fs::read_to_string(path)?)
}

pub fn write_energy(path: &Path, e: &BinaryEnergy) -> Result<(), FormatError> {
    fs::write(path, format_energy(e))?;
    Ok(())
}
