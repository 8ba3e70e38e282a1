//! Netpbm grayscale images (P2 ASCII and P5 binary).

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use lsa_core::problems::GrayImage;
use lsa_core::Labeling;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PgmError {
    #[error("not a PGM file (expected P2 or P5)")]
    Magic,
    #[error("malformed PGM header: {0}")]
    Header(String),
    #[error("truncated pixel data: expected {expected} samples, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("sample {value} exceeds maxval {maxval}")]
    Range { value: u32, maxval: u32 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Decoded PGM samples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pgm {
    pub width: usize,
    pub height: usize,
    pub maxval: u32,
    pub samples: Vec<u32>,
}

impl Pgm {
    /// Intensities scaled to `[0, 1]` by maxval.
    pub fn to_image(&self) -> GrayImage {
        let scale = self.maxval as f64;
        GrayImage::new(self.width, self.height, self.samples.iter().map(|&v| v as f64 / scale).collect())
            .expect("sample count checked on decode")
    }

    /// Thresholds at half of maxval: a sample is foreground when
    /// `2·v > maxval`, so maxval-1 files map 0/1 directly.
    pub fn to_labeling(&self) -> Labeling {
        Labeling::from_bools(self.samples.iter().map(|&v| 2 * v > self.maxval).collect())
    }

    /// P2 text with the given maxval.
    pub fn encode_ascii(&self) -> String {
        let mut out = String::new();
        writeln!(out, "P2\n{} {}\n{}", self.width, self.height, self.maxval).unwrap();
        for row in self.samples.chunks(self.width.max(1)) {
            let line: Vec<String> = row.iter().map(u32::to_string).collect();
            writeln!(out, "{}", line.join(" ")).unwrap();
        }
        out
    }
}

/// Quantizes intensities to `maxval` levels, clamping to `[0, 1]`.
pub fn from_image(img: &GrayImage, maxval: u32) -> Pgm {
    let samples = img.pixels().iter().map(|&v| (v.clamp(0.0, 1.0) * maxval as f64).round() as u32).collect();
    Pgm { width: img.width(), height: img.height(), maxval, samples }
}

/// 0/1 image with maxval 1. `width` must divide the labeling length.
pub fn from_labeling(s: &Labeling, width: usize) -> Pgm {
    let width = if width == 0 { s.len() } else { width };
    let height = s.len().checked_div(width).unwrap_or(0);
    Pgm { width, height, maxval: 1, samples: s.bits().iter().map(|&b| b as u32).collect() }
}

pub fn decode(bytes: &[u8]) -> Result<Pgm, PgmError> {
    let binary = match bytes.get(..2) {
        Some(b"P2") => false,
        Some(b"P5") => true,
        _ => return Err(PgmError::Magic),
    };
    let mut pos = 2;
    let mut header = [0u32; 3];
    for field in header.iter_mut() {
        *field = next_number(bytes, &mut pos)?;
    }
    let [width, height, maxval] = header;
    if maxval == 0 || maxval > 65535 {
        return Err(PgmError::Header(format!("maxval {maxval} out of range")));
    }
    let (width, height) = (width as usize, height as usize);
    let expected = width * height;
    let samples = if binary {
        // exactly one whitespace byte separates the header from the raster
        pos += 1;
        let data = bytes.get(pos..).unwrap_or(&[]);
        let sample_bytes = if maxval < 256 { 1 } else { 2 };
        if data.len() < expected * sample_bytes {
            return Err(PgmError::Truncated { expected, found: data.len() / sample_bytes });
        }
        if sample_bytes == 1 {
            data[..expected].iter().map(|&b| b as u32).collect()
        } else {
            data.chunks_exact(2).take(expected).map(|c| u16::from_be_bytes([c[0], c[1]]) as u32).collect()
        }
    } else {
        let mut samples = Vec::with_capacity(expected);
        for found in 0..expected {
            match next_number(bytes, &mut pos) {
                Ok(v) => samples.push(v),
                Err(PgmError::Header(_)) => return Err(PgmError::Truncated { expected, found }),
                Err(e) => return Err(e),
            }
        }
        samples
    };
    if let Some(&value) = samples.iter().find(|&&v| v > maxval) {
        return Err(PgmError::Range { value, maxval });
    }
    Ok(Pgm { width, height, maxval, samples })
}

/// Parses the next decimal token, skipping whitespace and `#` comments.
fn next_number(bytes: &[u8], pos: &mut usize) -> Result<u32, PgmError> {
    loop {
        match bytes.get(*pos) {
            Some(b'#') => {
                while bytes.get(*pos).is_some_and(|&b| b != b'\n') {
                    *pos += 1;
                }
            }
            Some(b) if b.is_ascii_whitespace() => *pos += 1,
            _ => break,
        }
    }
    let start = *pos;
    while bytes.get(*pos).is_some_and(u8::is_ascii_digit) {
        *pos += 1;
    }
    std::str::from_utf8(&bytes[start..*pos])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| PgmError::Header(format!("expected a number at byte {start}")))
}

pub fn read(path: &Path) -> Result<Pgm, PgmError> {
    decode(&fs::read(path)?)
}

pub fn write(path: &Path, pgm: &Pgm) -> Result<(), PgmError> {
    fs::write(path, pgm.encode_ascii())?;
    Ok(())
}
