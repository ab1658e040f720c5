//! Least-squares recovery of the scalar multiplier in `curl(beta Du) = 0`.
//!
//! Unknowns are nodal values of `beta`. Products `beta * du` are formed
//! nodewise, and every grid cell contributes the two linear equations
//!
//! ```text
//! d1(beta M_{i2}) - d2(beta M_{i1}) = 0,   i = 1, 2,
//! ```
//!
//! with the outer derivatives evaluated at the cell center by the staggered
//! half-cell stencil (edge averages of node differences, second order). The
//! staggering matters: node-centered outer differences commute with the
//! node-centered inner ones exactly, which would put constants in the
//! discrete kernel for *every* input map and blind the probe to
//! discretization error. On the staggered rows constants are exact kernel
//! vectors only when the products are constant (affine maps), and otherwise
//! carry the O(h^2) truncation signal the refinement studies measure.
//!
//! Since `beta -> c beta` preserves the equations, a normalization is
//! required: either mean one over all nodes or a pinned center node. The
//! constrained least-squares problem is solved by conjugate-gradient
//! iteration on the normal equations (deterministic, tolerance 1e-10, cap
//! 10x the unknown count).

use crate::algebra::Mat2;
use crate::KahanSum;

use super::curl::{gradient_field, scalar_gradient};
use super::grid::{Grid2, GridScalar, VectorField2};
use super::PdeError;

/// Gauge fix for the recovered multiplier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// Mean of `beta` over all nodes equals one.
    MeanOne,
    /// `beta` at the center node equals one.
    PinNode,
}

#[derive(Debug, Clone)]
pub struct BetaRecovery {
    pub beta: GridScalar,
    /// Discrete L2 norm of the curl equations at the minimizer.
    pub residual_norm: f64,
    pub iterations: usize,
}

const DET_FLOOR: f64 = 1e-6;
const CG_TOL: f64 = 1e-10;

struct CurlSystem {
    nx: usize,
    ny: usize,
    h: f64,
    du: Vec<Mat2>,
}

impl CurlSystem {
    fn new(u: &VectorField2) -> Self {
        let g = gradient_field(u);
        Self {
            nx: u.nx(),
            ny: u.ny(),
            h: u.h(),
            du: g.values().to_vec(),
        }
    }

    fn rows(&self) -> usize {
        2 * (self.nx - 1) * (self.ny - 1)
    }

    fn unknowns(&self) -> usize {
        self.nx * self.ny
    }

    /// Per-corner row coefficients of one cell equation: the staggered curl
    /// at the cell center pairs `+-M_{i2}` across x-edges with `-+M_{i1}`
    /// across y-edges.
    #[inline]
    fn coeff(&self, node: usize, i: usize, sx: f64, sy: f64) -> f64 {
        (sx * self.du[node].e[i][1] - sy * self.du[node].e[i][0]) / (2.0 * self.h)
    }

    /// `out = A beta`.
    fn apply(&self, beta: &[f64], out: &mut [f64]) {
        let (nx, ny) = (self.nx, self.ny);
        let mut row = 0;
        for iy in 0..ny - 1 {
            for ix in 0..nx - 1 {
                let n00 = iy * nx + ix;
                let n10 = iy * nx + ix + 1;
                let n01 = (iy + 1) * nx + ix;
                let n11 = (iy + 1) * nx + ix + 1;
                for i in 0..2 {
                    out[row] = beta[n00] * self.coeff(n00, i, -1.0, -1.0)
                        + beta[n10] * self.coeff(n10, i, 1.0, -1.0)
                        + beta[n01] * self.coeff(n01, i, -1.0, 1.0)
                        + beta[n11] * self.coeff(n11, i, 1.0, 1.0);
                    row += 1;
                }
            }
        }
    }

    /// `out = A^T r`.
    fn apply_transpose(&self, r: &[f64], out: &mut [f64]) {
        let (nx, ny) = (self.nx, self.ny);
        out.fill(0.0);
        let mut row = 0;
        for iy in 0..ny - 1 {
            for ix in 0..nx - 1 {
                let n00 = iy * nx + ix;
                let n10 = iy * nx + ix + 1;
                let n01 = (iy + 1) * nx + ix;
                let n11 = (iy + 1) * nx + ix + 1;
                for i in 0..2 {
                    let v = r[row];
                    out[n00] += v * self.coeff(n00, i, -1.0, -1.0);
                    out[n10] += v * self.coeff(n10, i, 1.0, -1.0);
                    out[n01] += v * self.coeff(n01, i, -1.0, 1.0);
                    out[n11] += v * self.coeff(n11, i, 1.0, 1.0);
                    row += 1;
                }
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = KahanSum::new();
    for (x, y) in a.iter().zip(b) {
        acc.add(x * y);
    }
    acc.value()
}

/// Projects out the constant component (for the mean-one gauge) or zeroes
/// the pinned coordinate (for the pin gauge).
fn project(norm: Normalization, pin: usize, v: &mut [f64]) {
    match norm {
        Normalization::MeanOne => {
            let mean = v.iter().sum::<f64>() / v.len() as f64;
            for x in v.iter_mut() {
                *x -= mean;
            }
        }
        Normalization::PinNode => v[pin] = 0.0,
    }
}

/// Recovers nodal `beta` minimizing the discrete curl equations in least
/// squares under the chosen normalization. Requires the sampled determinant
/// to stay away from zero (`min |det Du| >= 1e-6`).
pub fn beta_recover(
    u: &VectorField2,
    normalization: Normalization,
) -> Result<BetaRecovery, PdeError> {
    let sys = CurlSystem::new(u);
    let min_det = sys
        .du
        .iter()
        .map(|m| m.det().abs())
        .fold(f64::INFINITY, f64::min);
    if min_det < DET_FLOOR {
        return Err(PdeError::DegenerateDeterminant { min_abs: min_det });
    }

    let n_unknowns = sys.unknowns();
    let n_rows = sys.rows();
    let pin = (sys.ny / 2) * sys.nx + sys.nx / 2;

    // Base point satisfying the gauge: beta = 1 everywhere (MeanOne) or the
    // pinned-node indicator extended by 1 (both start from the constant 1;
    // the solver then searches the gauge-compatible complement).
    let base = vec![1.0; n_unknowns];

    // rhs = -P A^T (A base)
    let mut a_base = vec![0.0; n_rows];
    sys.apply(&base, &mut a_base);
    // When the constant already satisfies the equations to machine
    // precision (affine inputs), stop: the leftover rows are cancellation
    // dust and the near-null checkerboard direction would let CG chase it.
    let max_du = sys.du.iter().map(|m| m.frobenius()).fold(0.0_f64, f64::max);
    let base_resid = dot(&a_base, &a_base).sqrt();
    let noise_floor = 1e-12 * (n_rows as f64).sqrt() * (1.0 + max_du) / sys.h;
    if base_resid <= noise_floor {
        let mut l2 = KahanSum::new();
        for v in &a_base {
            l2.add(v * v);
        }
        let residual_norm = (l2.value() * sys.h * sys.h).sqrt();
        let beta = Grid2::new(sys.nx, sys.ny, sys.h, u.origin(), base)?;
        return Ok(BetaRecovery {
            beta,
            residual_norm,
            iterations: 0,
        });
    }
    let mut rhs = vec![0.0; n_unknowns];
    sys.apply_transpose(&a_base, &mut rhs);
    for v in rhs.iter_mut() {
        *v = -*v;
    }
    project(normalization, pin, &mut rhs);

    // Conjugate gradients on z -> P A^T A P z.
    let mut z = vec![0.0; n_unknowns];
    let mut r = rhs.clone();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    let rhs_norm = rr.sqrt();
    let cap = 10 * n_unknowns;
    let mut iterations = 0;
    let mut scratch_rows = vec![0.0; n_rows];
    let mut ap = vec![0.0; n_unknowns];

    if rhs_norm > 0.0 {
        for it in 0..cap {
            iterations = it + 1;
            let mut pp = p.clone();
            project(normalization, pin, &mut pp);
            sys.apply(&pp, &mut scratch_rows);
            sys.apply_transpose(&scratch_rows, &mut ap);
            project(normalization, pin, &mut ap);
            let pap = dot(&p, &ap);
            if pap <= 0.0 {
                break;
            }
            let alpha = rr / pap;
            for i in 0..n_unknowns {
                z[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            let rr_new = dot(&r, &r);
            if rr_new.sqrt() <= CG_TOL * rhs_norm {
                rr = rr_new;
                break;
            }
            let beta_cg = rr_new / rr;
            rr = rr_new;
            for i in 0..n_unknowns {
                p[i] = r[i] + beta_cg * p[i];
            }
        }
        if rr.sqrt() > CG_TOL * rhs_norm && iterations >= cap {
            return Err(PdeError::SolverStagnation {
                iterations,
                residual: rr.sqrt() / rhs_norm,
            });
        }
    }

    project(normalization, pin, &mut z);
    let beta_values: Vec<f64> = base.iter().zip(&z).map(|(b, dz)| b + dz).collect();

    let mut residual_rows = vec![0.0; n_rows];
    sys.apply(&beta_values, &mut residual_rows);
    let mut l2 = KahanSum::new();
    for v in &residual_rows {
        l2.add(v * v);
    }
    let residual_norm = (l2.value() * sys.h * sys.h).sqrt();

    let beta = Grid2::new(sys.nx, sys.ny, sys.h, u.origin(), beta_values)?;
    Ok(BetaRecovery {
        beta,
        residual_norm,
        iterations,
    })
}

/// Connected components of the "locally constant" mask
/// `{ |beta - median_3x3(beta)| <= 3 h }`, 4-connectivity. A diagnostic for
/// local constancy; grid artifacts can split components, so this is
/// reported, never asserted.
pub fn locally_constant_components(beta: &GridScalar) -> usize {
    let (nx, ny) = (beta.nx(), beta.ny());
    let tol = 3.0 * beta.h();
    let mut mask = vec![false; nx * ny];
    for iy in 0..ny {
        for ix in 0..nx {
            let mut window = Vec::with_capacity(9);
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    let jx = ix as i64 + dx;
                    let jy = iy as i64 + dy;
                    if jx >= 0 && jx < nx as i64 && jy >= 0 && jy < ny as i64 {
                        window.push(beta.at(jx as usize, jy as usize));
                    }
                }
            }
            window.sort_by(f64::total_cmp);
            let median = window[window.len() / 2];
            mask[iy * nx + ix] = (beta.at(ix, iy) - median).abs() <= tol;
        }
    }
    let mut seen = vec![false; nx * ny];
    let mut components = 0;
    let mut stack = Vec::new();
    for start in 0..nx * ny {
        if !mask[start] || seen[start] {
            continue;
        }
        components += 1;
        stack.push(start);
        seen[start] = true;
        while let Some(idx) = stack.pop() {
            let (ix, iy) = (idx % nx, idx / nx);
            let mut push = |jx: i64, jy: i64| {
                if jx >= 0 && jx < nx as i64 && jy >= 0 && jy < ny as i64 {
                    let j = jy as usize * nx + jx as usize;
                    if mask[j] && !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            };
            push(ix as i64 - 1, iy as i64);
            push(ix as i64 + 1, iy as i64);
            push(ix as i64, iy as i64 - 1);
            push(ix as i64, iy as i64 + 1);
        }
    }
    components
}

/// Max deviation of the recovered multiplier from its mean.
pub fn beta_deviation(beta: &GridScalar) -> f64 {
    let mean = beta.mean();
    beta.values()
        .iter()
        .map(|v| (v - mean).abs())
        .fold(0.0, f64::max)
}

pub(crate) fn grad_l2_norm(s: &GridScalar) -> f64 {
    let g = scalar_gradient(s);
    let mut acc = KahanSum::new();
    for v in g.values() {
        acc.add(v.dot(*v));
    }
    (acc.value() * s.h() * s.h()).sqrt()
}
