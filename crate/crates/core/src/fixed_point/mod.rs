//! Fixed points `phi(q) = q` of trigger and coarse trigger transformations.

mod chain;
mod efcce;
mod efce;
mod oracle;

use thiserror::Error;

use crate::deviations::DeviationError;

pub use chain::{power_iteration, recurrent_stationary, stationary_distribution, ChainMatrix};
pub use efcce::efcce_fixed_point;
pub use efce::{efce_fixed_point, extend_partial_fixed_point};
pub use oracle::brute_force_fixed_point;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FixedPointError {
    #[error("matrix is not column-stochastic (column {column})")]
    NotStochastic { column: usize },
    #[error("chain is reducible")]
    Reducible,
    #[error("power iteration stopped after {iterations} steps with residual {residual:e}")]
    MaxIter { iterations: usize, residual: f64 },
    #[error("at infoset {infoset}: {source}")]
    AtInfoset { infoset: usize, source: Box<FixedPointError> },
    #[error("dense fixed-point system has residual {residual:e}")]
    Singular { residual: f64 },
    #[error("expected a {expected:?} transformation")]
    WrongKind { expected: crate::deviations::DeviationKind },
    #[error(transparent)]
    Deviation(#[from] DeviationError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointOptions {
    /// Euclidean residual at which power iteration stops.
    pub tol: f64,
    pub max_iter: usize,
    /// Accept reducible chains, solving them exactly instead of by power
    /// iteration. Needed by learners whose iterates can leave the interior,
    /// such as regret matching.
    pub allow_reducible: bool,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        FixedPointOptions { tol: 1e-6, max_iter: 100_000, allow_reducible: false }
    }
}
