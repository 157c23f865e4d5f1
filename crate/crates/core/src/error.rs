use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("value {value} outside the domain ({lo}, {hi})")]
    Domain { value: f64, lo: f64, hi: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("table interpolation at r = {r} misses accuracy {accuracy:e} (estimated error {estimate:e})")]
    Interpolation { r: f64, accuracy: f64, estimate: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("quadrature hit the subdivision limit (value {value}, error estimate {abs_error:e})")]
    SubdivisionLimit { value: f64, abs_error: f64 },

    #[error("integrand is not finite at t = {at}")]
    NonFiniteValue { at: f64 },

    #[error("tridiagonal system is singular at row {row}")]
    SingularMatrix { row: usize },

    #[error("iteration did not converge: {0}")]
    Convergence(String),

    #[error("hypotheses do not match: {0}")]
    HypothesisMismatch(String),

    #[error("inconsistent input: {0}")]
    Consistency(String),

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("unknown catalog example `{0}`")]
    UnknownExample(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
