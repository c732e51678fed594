use thiserror::Error;

/// Errors produced by the estimation, forecasting and diagnostic routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is singular or not positive definite (pivot {pivot:e} at row {row})")]
    SingularMatrix { row: usize, pivot: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("autoregressive order must be at least 1, got {0}")]
    BadOrder(usize),

    #[error("a zero-order model has no characteristic roots")]
    ZeroOrder,

    #[error("series too short: need more than {needed} observations, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("history too short: need at least {needed} values, got {got}")]
    ShortHistory { needed: usize, got: usize },

    #[error("regression design matrix is singular")]
    SingularDesign,

    #[error("lag-vector Gram matrix is singular")]
    SingularGram,

    #[error("invalid root multiplicities: {0}")]
    BadMultiplicity(String),

    #[error("no forecast errors recorded at horizon {0}")]
    Empty(usize),

    #[error("degenerate regression: {0}")]
    Degenerate(&'static str),

    #[error("invalid root factor specification: {0}")]
    InvalidFactors(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
