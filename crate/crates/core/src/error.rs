use thiserror::Error;

/// Errors raised by the state, model and context operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A named item (outcome label, preparation, table entry) does not exist.
    #[error("lookup error: {0}")]
    Lookup(String),

    /// A value violates an invariant of its type beyond the allowed tolerance.
    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    /// The requested comparison has no defined value (e.g. entropy of a
    /// measure mixing supports of different dimension).
    #[error("unsupported comparison: {0}")]
    UnsupportedComparison(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
