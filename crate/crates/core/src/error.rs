use thiserror::Error;

/// Errors raised by the twin-beam library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The Fock truncation is too small for the requested state or evolution.
    #[error("truncation too small: {reason}; raise dim to at least {min_dim}")]
    Truncation { reason: String, min_dim: usize },

    /// A numerical self-check of the integrator failed.
    #[error("accuracy check failed: {0}")]
    Accuracy(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
