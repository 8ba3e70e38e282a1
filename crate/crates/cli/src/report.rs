//! Trace CSV and `key=value` summaries.

use std::fmt::Write as _;

use lsa_core::{SolverTrace, TraceRecord};

pub const TRACE_HEADER: &str = "iter,lambda,energy,predicted,actual,accepted,wall_ms";

/// Reals are written in shortest round-trip form; `accepted` is 0/1.
pub fn trace_csv(records: &[TraceRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for r in records {
        writeln!(
            out,
            "{},{:?},{:?},{:?},{:?},{},{:.3}",
            r.iter, r.lambda, r.energy, r.predicted, r.actual, r.accepted as u8, r.wall_ms
        )
        .unwrap();
    }
    out
}

/// Drops the `wall_ms` column, for comparing runs.
pub fn strip_wall_ms(csv: &str) -> String {
    csv.lines().map(|line| line.rsplit_once(',').map_or(line, |(head, _)| head)).collect::<Vec<_>>().join("\n")
}

/// Ordered `key=value` record, one pair per line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary {
    entries: Vec<(String, String)>,
}

impl Summary {
    pub fn new() -> Self {
        Summary::default()
    }

    pub fn push(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.entries.push((key.to_owned(), value.to_string()));
        self
    }

    /// Reals in shortest round-trip form.
    pub fn push_real(&mut self, key: &str, value: f64) -> &mut Self {
        self.push(key, format!("{value:?}"))
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    pub fn parse(text: &str) -> Summary {
        Summary {
            entries: text
                .lines()
                .filter_map(|l| l.split_once('='))
                .map(|(k, v)| (k.to_owned(), v.to_owned()))
                .collect(),
        }
    }

    /// Adds the standard solver fields.
    pub fn push_trace(&mut self, trace: &SolverTrace) -> &mut Self {
        self.push_real("energy", trace.energy)
            .push("iterations", trace.iterations())
            .push("termination", trace.termination)
    }
}
