use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CascadeError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl CascadeError {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        CascadeError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, CascadeError>;
