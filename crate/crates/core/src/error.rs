use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (symmetry residual {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("Jacobi iteration did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("dimension {dim} exceeds the cap of {cap}")]
    SizeCap { dim: usize, cap: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("cartesian basis is only defined for spin one")]
    InvalidBasis,

    #[error("dimension {0} is outside the supported range 2..=8")]
    DimensionOutOfRange(usize),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("Bloch vector norm {0} exceeds 1")]
    NormExceeded(f64),

    #[error("amplitude vector of length {0} does not reshape to a square d x d array")]
    NotBipartiteSquare(usize),

    #[error("value {0} is outside [0, 1]")]
    OutOfRange(f64),

    #[error("no optimizer restart converged ({restarts} attempted)")]
    OptimizerStall { restarts: usize },

    #[error("covariance not verified (residual {residual:e})")]
    CovarianceNotVerified { residual: f64 },

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
