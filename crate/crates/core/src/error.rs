//! Error type shared by all modules.

use thiserror::Error;

/// Errors produced by series construction, window solves, detection and
/// spline fitting.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("x values must be strictly increasing")]
    NotSorted,

    #[error("x and y must have the same length (got {x} and {y})")]
    LengthMismatch { x: usize, y: usize },

    #[error("series too short: need at least {needed} samples, got {got}")]
    SeriesTooShort { needed: usize, got: usize },

    #[error(
        "window out of bounds at gap {index}: supports {left}+{right} do not fit in {len} samples"
    )]
    WindowOutOfBounds {
        index: usize,
        left: usize,
        right: usize,
        len: usize,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("constraint matrix is rank deficient")]
    RankDeficient,

    #[error("ill-conditioned system: cond(VN) = {cond:.3e} exceeds limit {limit:.3e}")]
    IllConditioned { cond: f64, limit: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("covariance matrix is not symmetric positive semidefinite")]
    NotPsd,

    #[error("variance must be nonnegative (got {0})")]
    NegativeVariance(f64),

    #[error("confidence must lie strictly between 0 and 1 (got {0})")]
    InvalidConfidence(f64),

    #[error("knot placement leaves basis function {index} without support")]
    InadmissibleKnots { index: usize },

    #[error("evaluation point {x} outside the spline domain [{min}, {max}]")]
    OutOfDomain { x: f64, min: f64, max: f64 },
}

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
