use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A measure or density declaration violates its invariants.
    #[error("invalid measure: {field}: {reason}")]
    InvalidMeasure { field: String, reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("adaptive quadrature did not converge for lag {lag} within {budget} evaluations")]
    QuadratureNonConvergence { lag: usize, budget: usize },

    #[error("correlation sequence covers lags 0..={available}, lag {required} is required")]
    InsufficientLags { required: usize, available: usize },

    #[error("degenerate variance at x = {x} (s0 = {s0:e})")]
    DegenerateVariance { x: f64, s0: f64 },

    #[error("circulant embedding failed up to size {size} (min eigenvalue {min_eigenvalue:e}) and degree {n} is too large for the dense fallback")]
    EmbeddingFailed { size: usize, min_eigenvalue: f64, n: usize },

    #[error("degenerate leading coefficient ({magnitude:e})")]
    DegenerateLeadingCoefficient { magnitude: f64 },

    #[error("algebraic polynomial check failed at theta = {theta}: |Q(e^(i theta)) - e^(i n theta) sqrt(n) f(theta)| = {error:e}")]
    PolynomialMismatch { theta: f64, error: f64 },

    #[error("companion eigen-solve did not converge")]
    EigenSolveFailed,

    #[error("characteristic function grids differ")]
    GridMismatch,

    #[error("replicate {replicate}: {source}")]
    Replicate {
        replicate: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn measure(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidMeasure {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
