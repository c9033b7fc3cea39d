use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("empty graph")]
    EmptyGraph,

    #[error("invalid input: {0}")]
    Input(String),

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("solver failure: {0}")]
    Solver(String),

    /// A precondition of the requested construction does not hold.
    #[error("refused: {0}")]
    Refused(String),

    /// Two computation routes that must agree did not. Always a bug.
    #[error("internal consistency violation: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
        if expected == got {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected, got })
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Internal(format!("serialization: {e}"))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
