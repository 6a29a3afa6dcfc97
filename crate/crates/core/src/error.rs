use thiserror::Error;

/// Errors raised by the region, ordering and model routines.
///
/// The variants are grouped the way the command-line front end reports them:
/// malformed input, problem sizes the numerical routines do not cover, and
/// internal consistency failures.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid probability vector: {0}")]
    InvalidPmf(String),

    #[error("invalid channel matrix: {0}")]
    InvalidChannel(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("unsupported size: {0}")]
    Unsupported(String),

    #[error("query point lies outside the sampled hull")]
    OutsideHull,

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("invariant breach: {0}")]
    InvariantBreach(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Unsupported(_) => 3,
            Error::InvariantBreach(_) => 4,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
