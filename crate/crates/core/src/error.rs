use thiserror::Error;

/// Errors raised by the walk, spectral, metric and ensemble routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum WalkError {
    #[error("invalid hypercube dimension {n}: {reason}")]
    InvalidDimension { n: usize, reason: String },

    #[error("dimension mismatch: {what} has n={found}, expected n={expected}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("length {len} is not a power of two")]
    NotPowerOfTwo { len: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("Hamming weight {weight} out of range [0, {n}]")]
    WeightOutOfRange { weight: usize, n: usize },

    #[error("Hamming weight {weight} is degenerate for n={n}; need 1 <= |k| <= n-1")]
    DegenerateWeight { weight: usize, n: usize },

    #[error("coin index {index} out of range for n={n}")]
    CoinIndexOutOfRange { index: usize, n: usize },

    #[error("coin matrix is not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("distribution is not a function of Hamming weight (max spread {spread:e})")]
    NotHammingSymmetric { spread: f64 },

    #[error("negative probability {value:e} at index {index}")]
    NegativeProbability { index: usize, value: f64 },

    #[error("probabilities sum to {sum}, expected 1")]
    NotNormalized { sum: f64 },

    #[error("{name} = {value} out of range: {expected}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("requested {requested} steps but only {available} are available")]
    HistoryTooShort { requested: usize, available: usize },

    #[error("resource limit: {0}")]
    ResourceLimit(String),
}

pub type Result<T> = std::result::Result<T, WalkError>;
