use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not symmetric positive definite: {0}")]
    NotSpd(String),
    #[error("matrix is not skew-symmetric: {0}")]
    NotSkew(String),
    #[error("eigendecomposition did not converge")]
    ConvergenceFailure,
    #[error("dimension too small: need n >= 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid cone parameters: {0}")]
    BadParams(String),
    #[error("internal cross-check failed: {0}")]
    Inconsistent(String),
    #[error("matrix is not a member of the admissible cone: {0}")]
    NotMember(String),
    #[error("eta must lie in (0, 1], got {0}")]
    BadEta(f64),
    #[error("operator is not elliptic: {0}")]
    NonElliptic(String),
    #[error("invalid input: {0}")]
    BadInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
