use crate::ensemble::StateLabel;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A text file (`.proc` or `.ens`) failed strict parsing.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// An argument violated a documented precondition.
    #[error("{0}")]
    InvalidInput(String),

    /// Two states or vectors with different party counts were combined.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A protocol required an orthonormal ensemble and the given process
    /// does not induce one. The offending pair of states is named.
    #[error("ensemble is not orthonormal: states {0} and {1} are not orthogonal")]
    NonOrthonormal(StateLabel, StateLabel),

    /// The requested party count exceeds what the operation supports.
    #[error("{what} supports at most n = {max} parties, got n = {n}")]
    TooLarge {
        what: &'static str,
        n: usize,
        max: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn input(message: impl Into<String>) -> Self {
        Error::InvalidInput(message.into())
    }
}
