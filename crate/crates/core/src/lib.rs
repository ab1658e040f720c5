//! Numerical laboratory for determinant rigidity of planar polyconvex
//! energies of the form `f(X) = g(det X)`.
//!
//! The crate is organized around the objects that rigidity statements for
//! such energies are made of:
//!
//! - [`algebra`] — exact small-matrix algebra: determinants, cofactors,
//!   minors of stacked 6x2 matrices, rank-one gap factorizations and the
//!   rotation `J`.
//! - [`integrand`] — strictly convex integrand bundles `(g, g', g'')` with
//!   normalization checks and the auxiliary function `h(t) = g'(t)t - g(t)`
//!   together with its fiber inversion.
//! - [`inclusion`] — lifting maps into the first-order and stationary
//!   inclusion sets and computable membership surrogates (fiber residual,
//!   descent-based distance estimate).
//! - [`laminate`] — two-phase oscillating piecewise-affine maps on the unit
//!   disc whose gradients defeat strong compactness, plus gradient sampling
//!   and phase statistics.
//! - [`young`] — finitely supported probability measures on 6x2 matrix
//!   space, minor moment relations, and the two-atom admissibility search.
//! - [`pde`] — uniform-grid probes: weak/strong curl residuals,
//!   Euler-Lagrange residuals, least-squares recovery of a scalar multiplier
//!   field, stationarity classification and level-curve tracing.

pub mod algebra;
pub mod inclusion;
pub mod integrand;
pub mod laminate;
pub mod pde;
pub mod young;

mod kahan;

pub use kahan::KahanSum;
