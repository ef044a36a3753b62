use thiserror::Error;

/// Errors surfaced by the library's public operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter {name}: {reason}")]
    InvalidParam { name: &'static str, reason: String },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("batch too small: {0}")]
    BatchTooSmall(String),

    #[error("probabilities must sum to 1, got {0}")]
    BadDistribution(f64),

    #[error("RFF bases must be sampled with distinct seeds")]
    IdenticalBases,

    #[error("checkpoint parse error: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
