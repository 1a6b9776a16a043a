use thiserror::Error;

use crate::params::ValidationReport;
use crate::potential::SpacetimePoint;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid parameter set:\n{0}")]
    InvalidParameters(ValidationReport),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("matrix A is singular at {point} (zero pivot in column {pivot})")]
    Singular { point: SpacetimePoint, pivot: usize },

    #[error("matrix A is near-singular at {point}: |det A| = {abs_det:e}, rcond = {rcond:e}")]
    NearSingular {
        point: SpacetimePoint,
        abs_det: f64,
        rcond: f64,
    },

    #[error("inverse velocity solve did not converge (best residual {residual:e})")]
    NoConvergence { residual: f64 },

    #[error("derivative index must have length 1..=5, got {0}")]
    InvalidIndex(usize),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
