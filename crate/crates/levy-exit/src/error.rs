//! Error type shared across the crate.

use crate::linalg::SolveStats;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A scalar argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A structural argument (grid size, parameter combination) is invalid.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The iterative solver stopped before reaching the requested tolerance.
    /// Carries the best iterate found together with its solve statistics.
    #[error(
        "linear solve did not converge: relative residual {:.3e} after {} iterations",
        stats.final_residual,
        stats.iterations
    )]
    NonConvergence { stats: SolveStats, best: Vec<f64> },

    /// Gaussian elimination hit a pivot too small to trust.
    #[error("matrix is numerically singular at pivot column {pivot_index}")]
    Singular { pivot_index: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
