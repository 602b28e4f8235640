use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("integer overflow computing {0}")]
    Overflow(String),

    #[error("subcube index {index:?} out of range for m = {m}")]
    IndexOutOfRange { index: Vec<usize>, m: usize },

    #[error("point {point:?} lies outside {region}")]
    OutOfDomain { point: Vec<f64>, region: String },

    #[error("interpolation system ill-conditioned (reciprocal condition {rcond:e} < {threshold:e})")]
    IllConditioned { rcond: f64, threshold: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("budget violation: {0}")]
    Budget(String),

    #[error("integrand `{0}` has no known exact integral")]
    NoExactIntegral(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}
