use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("representation mismatch: expected {expected}, found {found}")]
    Representation { expected: &'static str, found: String },

    /// The integrand behaves like `z^{-w}` with `w >= 1` near the left endpoint.
    #[error("non-integrable endpoint singularity: weight exponent {0} must be < 1")]
    SingularWeight(f64),

    #[error("insufficient nodes: need at least {needed}, got {got}")]
    InsufficientNodes { needed: usize, got: usize },

    /// A named hypothesis or parameter constraint does not hold.
    #[error("{name} requires {detail}")]
    Constraint { name: &'static str, detail: String },

    #[error("right-hand side evaluation failed at node {node} (t = {t}): {message}")]
    RhsEvaluation { node: usize, t: f64, message: String },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("quadrature did not reach tolerance: estimate {estimate}, error bound {error}")]
    Quadrature { estimate: f64, error: f64 },
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
