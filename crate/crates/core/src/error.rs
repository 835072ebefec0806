use thiserror::Error;

/// Failures raised by the jet operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("numerically singular {0}")]
    Singular(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// No pivot set satisfies the chart conditions.
    #[error("chart failure: {0}")]
    Chart(String),

    #[error("invalid value: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, JetError>;

pub(crate) fn dim_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(JetError::Dimension(msg.into()))
}
