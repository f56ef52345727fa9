use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point lies outside the domain")]
    OutsideDomain,
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("unsupported domain for {0}")]
    UnsupportedDomain(&'static str),
    #[error("Laurent truncation did not converge within {max_terms} terms")]
    TruncationNotConverged { max_terms: usize },
    #[error("biholomorphic map is not invertible at the requested point")]
    MapNotInvertibleAtPoint,
    #[error("Gram matrix is ill conditioned (estimate {estimate:.3e})")]
    IllConditionedGram { estimate: f64 },
    #[error("Gram matrix is not positive definite at pivot {pivot}")]
    GramNotPositive { pivot: usize },
    #[error("kernel vanishes at the requested pair")]
    KernelZeroAtPair,
    #[error("kernel cannot be polarized: {0}")]
    KernelNotPolarizable(String),
    #[error("finite-difference stencil leaves the domain")]
    StencilExitsDomain,
    #[error("jet order {0} exceeds the supported order 4")]
    OrderTooHigh(usize),
    #[error("metric is singular or not positive definite")]
    SingularMetric,
    #[error("direction vector is zero")]
    ZeroDirection,
    #[error("quadratic form out of range: 1 - c^2 Q / 2 = {0}")]
    QuadraticFormOutOfRange(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("kernel cache: {0}")]
    Cache(String),
}

pub type Result<T> = std::result::Result<T, Error>;
