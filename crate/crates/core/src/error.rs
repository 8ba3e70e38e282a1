use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} variables, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("variable index {index} out of range for {num_vars} variables")]
    IndexOutOfRange { index: usize, num_vars: usize },

    #[error("pair ({p}, {q}) must satisfy p < q")]
    PairOrder { p: usize, q: usize },

    #[error("duplicate pair ({p}, {q})")]
    DuplicatePair { p: usize, q: usize },

    #[error("non-finite {what} coefficient")]
    NonFinite { what: &'static str },

    #[error("pair ({p}, {q}) has positive coefficient {w}; energy is not submodular")]
    NotSubmodular { p: usize, q: usize, w: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: &'static str },

    #[error("instance with {num_vars} variables exceeds the enumeration limit of {limit}")]
    TooLarge { num_vars: usize, limit: usize },

    #[error("image is empty")]
    EmptyImage,

    #[error("image size {width}x{height} does not match {len} pixels")]
    ImageSize { width: usize, height: usize, len: usize },
}
