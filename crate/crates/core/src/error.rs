use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not symmetric")]
    NotSymmetric,

    #[error("form is not positive definite (pivot {index} is {pivot})")]
    NotPositiveDefinite { index: usize, pivot: String },

    #[error("entry ({row}, {col}) is not an integer")]
    NonIntegral { row: usize, col: usize },

    #[error("matrix has rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },

    #[error("form is not even")]
    NotEven,

    #[error("vector is not a member of the lattice")]
    NotInLattice,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("cap exceeded: {0}")]
    CapExceeded(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("verification failed at stage `{stage}`: {detail}")]
    Verification { stage: String, detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn verification(stage: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Verification {
            stage: stage.into(),
            detail: detail.into(),
        }
    }
}
