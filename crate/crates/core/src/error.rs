use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("Hurst parameter must lie in (0, 1), got {0}")]
    InvalidHurst(f64),

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("paths are defined on different time grids")]
    GridMismatch,

    #[error("time {0} is not a node of the grid")]
    OffGrid(f64),

    #[error("state became non-finite at step {step}")]
    NonFinite { step: usize },

    #[error(
        "steady-state search did not converge after {iterations} iterations \
         (best |grad g| = {gradient_norm:e})"
    )]
    NonConvergence {
        best: Vec<f64>,
        gradient_norm: f64,
        iterations: usize,
    },

    #[error("quadrature did not reach tolerance (estimate {value}, error {error:e})")]
    Quadrature { value: f64, error: f64 },

    #[error("ensembles are not coupled: replicate {replicate} uses different seeds")]
    CouplingViolation { replicate: usize },

    #[error("unknown energy `{0}`")]
    UnknownEnergy(String),

    #[error("matrix is not symmetric positive definite")]
    NotPositiveDefinite,

    #[error("closed-form exponential is undefined for xi = 0")]
    DegenerateXi,
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            name,
            reason: reason.into(),
        }
    }
}
