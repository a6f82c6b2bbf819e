use thiserror::Error;

/// Errors produced by the heptainv library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("index {name} = {value} out of range (max {max})")]
    IndexOutOfRange {
        name: &'static str,
        value: usize,
        max: usize,
    },

    #[error("dimension n = {n} too small; this matrix family requires n >= {min}")]
    DimensionTooSmall { n: usize, min: usize },

    #[error("dimension mismatch: expected length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{what} is limited to n <= {limit}, got {got}")]
    GuardExceeded {
        what: &'static str,
        limit: usize,
        got: usize,
    },

    #[error("matrix is singular to working precision (pivot {index})")]
    Singular { index: usize },

    #[error("matrix not positive definite: pivot {index} = {pivot}")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("non-finite value encountered in {what}")]
    NonFinite { what: &'static str },

    #[error("unknown family variant `{0}` (expected `toeplitz` or `near`)")]
    UnknownVariant(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("a Lipschitz constant is required for contraction prediction")]
    MissingLipschitz,
}

pub type Result<T> = std::result::Result<T, Error>;
