use thiserror::Error;

/// Malformed textual input: series, divisor literals, scenario lines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message}")]
pub struct ParseError {
    pub message: String,
}

impl ParseError {
    pub fn new(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
        }
    }
}

/// Everything that can go wrong while driving the model.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    /// An operation was asked for outside the hypotheses it needs.
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// The model contradicts itself (fact set, binding, or a cross-check).
    #[error("inconsistency: {0}")]
    Inconsistency(String),
}

impl Error {
    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub fn inconsistency(msg: impl Into<String>) -> Self {
        Error::Inconsistency(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
