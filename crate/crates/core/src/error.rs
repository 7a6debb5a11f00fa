use thiserror::Error;

/// Errors raised by the simulator, the fitting pipeline and the data loaders.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A value failed a structural check (unitarity, normalization, ordering).
    #[error("validation error: {0}")]
    Validation(String),

    /// Input data is missing required structure, e.g. a CSV without a Close column.
    #[error("format error: {0}")]
    Format(String),

    /// A single input row could not be parsed.
    #[error("line {line}: {message}")]
    Row { line: u64, message: String },

    /// The objective returned NaN or an infinity.
    #[error("objective returned non-finite value {value} at evaluation {evaluation}")]
    NonFinite { evaluation: usize, value: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
