//! Grid-level probes of the constancy theory: weak/strong curl residuals,
//! Euler-Lagrange residuals, least-squares recovery of the scalar multiplier
//! in `curl(beta Du) = 0`, stationarity classification through the h-field,
//! and level-curve tracing of sampled maps.

mod beta;
mod curl;
mod grid;
mod level_curve;
mod maps;
mod stationarity;

pub use beta::{
    beta_deviation, beta_recover, locally_constant_components, BetaRecovery, Normalization,
};
pub use curl::{
    det_field, el_residual, gradient_field, scalar_gradient, weak_curl_residual, CurlResidual,
    WeakValue, BUMP_GRID,
};
pub use grid::{fmt_g, Grid2, GridScalar, MatrixField2, NodeValue, VectorField2, MIN_NODES};
pub use level_curve::{trace_level_curve, LevelCurveTrace};
pub use maps::{test_map_field, TestMap, AFFINE_MATRIX};
pub use stationarity::{stationarity_check, StationarityReport};

use thiserror::Error;

use crate::integrand::IntegrandError;

#[derive(Debug, Error)]
pub enum PdeError {
    #[error("grid too small: {nx} x {ny} nodes (need at least 8 per side)")]
    GridTooSmall { nx: usize, ny: usize },
    #[error("grid spacing must be positive and finite, got {0}")]
    BadSpacing(f64),
    #[error("value count mismatch: expected {expected}, got {got}")]
    ValueCount { expected: usize, got: usize },
    #[error("non-finite value in grid field")]
    NonFiniteValue,
    #[error("degenerate determinant: min |det Du| = {min_abs:e} below 1e-6")]
    DegenerateDeterminant { min_abs: f64 },
    #[error("solver stagnation: {iterations} iterations, relative residual {residual:e}")]
    SolverStagnation { iterations: usize, residual: f64 },
    #[error("level curve left the grid domain at step {step}")]
    LeftDomain { step: usize },
    #[error("degenerate gradient on curve at step {step}")]
    DegenerateGradientOnCurve { step: usize },
    #[error("seed is not on the requested level set: |u - level| = {gap:e} > h = {h:e}")]
    SeedOffLevel { gap: f64, h: f64 },
    #[error("field file error at byte offset {offset}: {message}")]
    FileFormat { offset: usize, message: String },
    #[error("component index must be 1 or 2, got {0}")]
    BadComponent(usize),
    #[error(transparent)]
    Integrand(#[from] IntegrandError),
}
