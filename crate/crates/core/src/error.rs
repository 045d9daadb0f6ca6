use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A matrix or vector contained NaN or an infinity.
    #[error("non-finite value at {context}")]
    NonFinite { context: String },

    #[error("matrix is not symmetric: entry ({row},{col}) differs from its mirror by {diff:e}")]
    NotSymmetric { row: usize, col: usize, diff: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("empty input: {0}")]
    Empty(String),

    #[error("congruence weight {index} is zero or non-finite ({value})")]
    InvalidWeight { index: usize, value: f64 },

    /// Evaluation point outside the open domain of a function.
    #[error("x = {x} is outside the domain ({a}, {b})")]
    OutsideDomain { x: f64, a: f64, b: f64 },

    /// Structured-document validation failed at `path`.
    #[error("{path}: {message}")]
    Schema { path: String, message: String },

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("matrix is not positive definite (minimum eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
}

impl Error {
    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
