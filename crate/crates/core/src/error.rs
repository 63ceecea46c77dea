use thiserror::Error;

/// Errors raised by the estimation toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the model.
    #[error("domain error: {0}")]
    Domain(String),

    /// A caller broke a documented precondition (e.g. mismatched strategy and outcome).
    #[error("contract violation: {0}")]
    Contract(String),

    /// A numerical result could not be certified to the requested accuracy.
    #[error("accuracy error: {message} (estimate {estimate:e}, reference {reference:e})")]
    Accuracy {
        message: String,
        estimate: f64,
        reference: f64,
    },

    /// Every node of a density vanished, so it cannot be normalized.
    #[error("degenerate evidence: {0}")]
    Degenerate(String),

    /// Nonlinear least squares did not converge within its iteration budget.
    #[error("fit did not converge after {iterations} iterations (best cost {best_cost:e})")]
    NoConvergence {
        iterations: usize,
        best_cost: f64,
        best: [f64; 3],
    },

    /// The normal equations are singular at the current iterate.
    #[error("rank-deficient Jacobian: {0}")]
    Rank(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn contract(msg: impl Into<String>) -> Error {
    Error::Contract(msg.into())
}
