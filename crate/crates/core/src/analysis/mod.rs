//! Finite-size-scaling collapse and error estimation.
//!
//! The scaling form is `value = L^zeta F((p - p_c) L^(1/nu))`.

mod bootstrap;
mod collapse;
mod fit;
mod simplex;

use thiserror::Error;

pub use bootstrap::{
    bootstrap_fss, bootstrap_variance, sem_variance_error, BootstrapFss, CellSamples, Statistic, VarianceEstimate,
};
pub use collapse::{collapse_quality, collapse_terms, scaled_points, FssInput, FssPoint, FssSeries, ScaledPoint};
pub use fit::{fit_collapse, FitOptions, FssResult, ZetaMode, NU_BOUNDS, P_C_BOUNDS, ZETA_BOUNDS};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("invalid scaling input: {0}")]
    InvalidInput(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("scaled data of different sizes do not overlap")]
    NoOverlap,
    #[error("need at least {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("collapse fit did not converge; best quality {:.4} at p_c = {:.4}, nu = {:.4}", .best.quality, .best.p_c, .best.nu)]
    FitFailure { best: Box<FssResult> },
    #[error("{failed} of {total} bootstrap fits failed")]
    TooManyFailures { failed: usize, total: usize },
}
