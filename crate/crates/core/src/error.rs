use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("block {block} is not Hermitian (deviation {deviation:e})")]
    NotHermitian { block: usize, deviation: f64 },

    #[error("block {block} is not positive semidefinite (eigenvalue {eigenvalue:e})")]
    NotPositive { block: usize, eigenvalue: f64 },

    #[error("density is not normalized: trace {trace}")]
    NotNormalized { trace: f64 },

    #[error("density has zero trace")]
    ZeroTrace,

    #[error("block {block} is not unitary (deviation {deviation:e})")]
    NotUnitary { block: usize, deviation: f64 },

    #[error("invalid rank profile: {0}")]
    InvalidRankProfile(String),

    #[error("eigensolver failed to converge on a {0}x{0} block")]
    EigenSolver(usize),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("scale factor must be a finite nonnegative real, got {0}")]
    InvalidScale(f64),

    #[error("invalid atom {index}: {reason}")]
    InvalidAtom { index: usize, reason: String },

    #[error("unknown divergence {0:?}")]
    UnknownDivergence(String),

    #[error("parameter out of range: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
