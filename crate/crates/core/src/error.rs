use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("index {requested} is outside the sequence horizon {horizon}")]
    Horizon { requested: usize, horizon: usize },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("submajorization fails at index {index}")]
    NotSubmajorized { index: usize },

    #[error("precondition violated at index {index}: {reason}")]
    Precondition { index: usize, reason: String },

    #[error("construction error: {0}")]
    Construction(String),

    /// A feasible decomposition instance for which no path produced a
    /// certificate. This is a bug, not a property of the input.
    #[error("decomposition solver failed on a feasible instance ({0})")]
    SolverDefect(String),

    #[error("{path}: line {line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    /// True for failures of a mathematical precondition (as opposed to a
    /// malformed request).
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::NotSubmajorized { .. } | Error::Precondition { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
