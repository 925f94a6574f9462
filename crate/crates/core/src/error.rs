use thiserror::Error;

/// Errors produced by the model constructors and solvers.
#[derive(Debug, Error)]
pub enum ModelError {
    /// An input violates a precondition of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Vector/matrix sizes passed to an operation do not line up.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// The fixed-point iteration for the event-rate system did not
    /// converge; this usually means the transition matrix has a row sum
    /// at or above 1.
    #[error("fixed-point iteration did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },

    /// An empirical distribution with no samples was passed to a
    /// comparison routine.
    #[error("empty empirical distribution")]
    EmptyPmf,
}

impl ModelError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        ModelError::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, ModelError>;
