use thiserror::Error;

pub type Result<T, E = KappaError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KappaError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid set: {0}")]
    InvalidSet(String),

    #[error("empty set not allowed: {0}")]
    EmptySet(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("operator is singular (|det| = {0:e})")]
    SingularOperator(f64),

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    #[error("not an interval order: {0}")]
    NotIntervalOrder(String),

    #[error("invalid order: {0}")]
    InvalidOrder(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    /// A postcondition the implementation guarantees did not hold.
    #[error("internal error: {0}")]
    Internal(String),
}

impl KappaError {
    /// True for errors caused by malformed input values rather than by a
    /// failed computation.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            KappaError::DimensionMismatch { .. } | KappaError::InvalidSet(_) | KappaError::InvalidArgument(_)
        )
    }
}
