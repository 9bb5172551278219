use thiserror::Error;

/// Errors raised by the library. Every variant maps onto one of the CLI's
/// exit classes (usage/domain vs. verification failure).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("index {index} out of range (available: {available})")]
    OutOfRange { index: usize, available: usize },

    #[error("{value} cannot be handled with a prime table of limit {limit}; rebuild with a larger sieve")]
    NeedsLargerTable { value: u64, limit: usize },

    #[error("target {target} outside [{lo}, {hi})")]
    TargetOutOfRange { target: f64, lo: f64, hi: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("requested tolerance {tol:e} needs more than {cap} terms")]
    PrecisionUnachievable { tol: f64, cap: u64 },

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("inconclusive: {0}")]
    Inconclusive(String),
}

pub type Result<T> = std::result::Result<T, Error>;
