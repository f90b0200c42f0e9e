use thiserror::Error;

/// Errors raised by the analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A sample or spectrum value was NaN or infinite.
    #[error("non-finite value at index {index}")]
    NonFinite { index: i64 },

    /// A linear system could not be factorized at the requested regularization.
    #[error("factorization failed: {0}")]
    Factorization(String),

    /// Band estimation could not single out an admissible support arc.
    #[error("ambiguous band estimate: {0}")]
    AmbiguousBand(String),

    /// Malformed sequence or config file.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
