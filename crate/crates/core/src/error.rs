use crate::C64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid symbol: {0}")]
    InvalidSymbol(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("series did not converge after {terms} terms (last block sum {block_sum:e})")]
    NonConvergent { terms: usize, block_sum: f64 },

    /// Doubling a symbol with a non-zero limit produces a 2-periodic tail.
    #[error("doubled symbol has parity tails c1 = {c1}, c2 = {c2}")]
    UnsupportedTail { c1: C64, c2: C64 },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("symbol is not in class C: {0}")]
    NotInClassC(String),

    #[error("symbol is not in class C': {0}")]
    NotInClassCPrime(String),

    #[error("basis of {size} words exceeds the cap of {cap}")]
    TooLarge { size: usize, cap: usize },

    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("invalid word: {0}")]
    InvalidWord(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
