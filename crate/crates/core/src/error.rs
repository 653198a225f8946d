use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, QicError>;

#[derive(Debug, Error)]
pub enum QicError {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not unitary (residual {residual:.3e})")]
    InvalidUnitary { residual: f64 },

    #[error("operator is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("a partner needs at least two sites")]
    NoEnvironment,

    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("assembled SWAP is not unitary (residual {residual:.3e}); the virtual qudit is broken")]
    BrokenVirtualQudit { residual: f64 },

    #[error("degenerate variance: v^T M v = {variance:e}")]
    DegenerateVariance { variance: f64 },

    #[error("covariance matrix is not symmetric (max asymmetry {residual:.3e})")]
    AsymmetricCovariance { residual: f64 },

    #[error("state violates the uncertainty relation (min eigenvalue {min_eigenvalue:.3e})")]
    Uncertainty { min_eigenvalue: f64 },

    #[error("state is not pure (purity residual {residual:.3e})")]
    ImpureState { residual: f64 },

    #[error("unphysical mode: det m = {det} < 1/4")]
    UnphysicalMode { det: f64 },

    #[error("mode matrix is ill-conditioned (inversion residual {residual:.3e})")]
    IllConditioned { residual: f64 },

    #[error("numerical failure: {what} (residual {residual:.3e})")]
    NumericalFailure { what: &'static str, residual: f64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl QicError {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        QicError::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        QicError::Io {
            path: path.into(),
            source,
        }
    }
}
