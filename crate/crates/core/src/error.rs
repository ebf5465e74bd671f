use thiserror::Error;

/// Errors produced by the operator-mean library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {dim} exceeds the configured cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("invalid matrix data: {0}")]
    InvalidMatrix(String),

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal residual {residual:e})")]
    EigenNonConvergence { sweeps: usize, residual: f64 },

    #[error("function is not finite at eigenvalue {eigenvalue:e}")]
    Domain { eigenvalue: f64 },

    #[error("matrix is not positive definite within the SPD floor (min eigenvalue {min:e}, max eigenvalue {max:e})")]
    Conditioning { min: f64, max: f64 },

    #[error("matrix is numerically singular (smallest pivot {pivot:e})")]
    Singular { pivot: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("root bracketing failed after {doublings} doublings at t = {t:e}")]
    RootBracketing { t: f64, doublings: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
