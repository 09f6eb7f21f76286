use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be 3, 4 or 5 (got {0})")]
    InvalidDimension(u32),

    #[error(
        "adaptive quadrature did not reach tolerance {tol:e}: estimated error {error:e} after {intervals} intervals"
    )]
    QuadratureNonConvergence { tol: f64, error: f64, intervals: usize },

    #[error("ground-state identity check failed: {0}")]
    ProfileInconsistent(String),

    #[error("bisection bracket invalid: {0}")]
    RootBracketFailure(String),

    #[error("threshold pair (energy={energy}, gradSq={grad_sq}) is not realized by any function: {reason}")]
    InfeasiblePair { energy: f64, grad_sq: f64, reason: String },

    #[error("pair is not in the blow-up region: {0}")]
    RegionMismatch(String),

    #[error("tridiagonal solve failed at row {row}")]
    SolveFailure { row: usize },

    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("run terminated with {0}; a run reaching tEnd is required")]
    WrongTermination(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
