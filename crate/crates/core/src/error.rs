use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A certificate or invariant check failed on otherwise well-formed data.
    #[error("check failed: {0}")]
    CheckFailed(String),

    /// The requested object provably cannot exist at the requested size.
    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn check(msg: impl Into<String>) -> Self {
        Error::CheckFailed(msg.into())
    }

    /// Process exit code used by the command line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::CheckFailed(_) | Error::Numerical(_) => 2,
            Error::Infeasible(_) => 3,
            Error::InvalidInput(_) | Error::Json(_) | Error::Io(_) => 4,
        }
    }
}
