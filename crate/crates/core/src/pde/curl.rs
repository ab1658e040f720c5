//! Finite-difference gradients and curl residuals.
//!
//! The strong residual of a matrix field `M` is, row by row,
//! `d1 M_{i2} - d2 M_{i1}` (centered differences inside, second-order
//! one-sided at the boundary). The weak residual pairs each row against a
//! fixed 3x3 family of tensor-product bumps by midpoint quadrature:
//! `int (M_{i1} d2 phi - M_{i2} d1 phi)`. The distributional (weak) form is
//! the ground truth for the equations probed here; the strong form is the
//! cheap diagnostic.

use crate::algebra::{Mat2, Vec2};
use crate::integrand::ConvexIntegrand;
use crate::KahanSum;

use super::grid::{Grid2, GridScalar, MatrixField2, VectorField2};

/// Centered difference along x at interior nodes, second-order one-sided at
/// the two boundary columns.
fn d1<T, F>(field: &Grid2<T>, get: &F, ix: usize, iy: usize) -> f64
where
    T: super::grid::NodeValue,
    F: Fn(T) -> f64,
{
    let h = field.h();
    let nx = field.nx();
    if ix == 0 {
        (-3.0 * get(field.at(0, iy)) + 4.0 * get(field.at(1, iy)) - get(field.at(2, iy)))
            / (2.0 * h)
    } else if ix == nx - 1 {
        (3.0 * get(field.at(nx - 1, iy)) - 4.0 * get(field.at(nx - 2, iy))
            + get(field.at(nx - 3, iy)))
            / (2.0 * h)
    } else {
        (get(field.at(ix + 1, iy)) - get(field.at(ix - 1, iy))) / (2.0 * h)
    }
}

fn d2<T, F>(field: &Grid2<T>, get: &F, ix: usize, iy: usize) -> f64
where
    T: super::grid::NodeValue,
    F: Fn(T) -> f64,
{
    let h = field.h();
    let ny = field.ny();
    if iy == 0 {
        (-3.0 * get(field.at(ix, 0)) + 4.0 * get(field.at(ix, 1)) - get(field.at(ix, 2)))
            / (2.0 * h)
    } else if iy == ny - 1 {
        (3.0 * get(field.at(ix, ny - 1)) - 4.0 * get(field.at(ix, ny - 2))
            + get(field.at(ix, ny - 3)))
            / (2.0 * h)
    } else {
        (get(field.at(ix, iy + 1)) - get(field.at(ix, iy - 1))) / (2.0 * h)
    }
}

/// Jacobian of a sampled map: `Du[i][j] = d_j u_i`. Exact on affine inputs
/// and on quadratics (both stencils are second order).
pub fn gradient_field(u: &VectorField2) -> MatrixField2 {
    let mut values = Vec::with_capacity(u.nx() * u.ny());
    for iy in 0..u.ny() {
        for ix in 0..u.nx() {
            let d1u1 = d1(u, &|v: Vec2| v.x, ix, iy);
            let d2u1 = d2(u, &|v: Vec2| v.x, ix, iy);
            let d1u2 = d1(u, &|v: Vec2| v.y, ix, iy);
            let d2u2 = d2(u, &|v: Vec2| v.y, ix, iy);
            values.push(Mat2::new(d1u1, d2u1, d1u2, d2u2));
        }
    }
    Grid2::new(u.nx(), u.ny(), u.h(), u.origin(), values).expect("same grid")
}

/// Gradient of a sampled scalar, same stencils.
pub fn scalar_gradient(s: &GridScalar) -> VectorField2 {
    let mut values = Vec::with_capacity(s.nx() * s.ny());
    for iy in 0..s.ny() {
        for ix in 0..s.nx() {
            values.push(Vec2::new(
                d1(s, &|v: f64| v, ix, iy),
                d2(s, &|v: f64| v, ix, iy),
            ));
        }
    }
    Grid2::new(s.nx(), s.ny(), s.h(), s.origin(), values).expect("same grid")
}

/// Nodewise determinant of a matrix field.
pub fn det_field(m: &MatrixField2) -> GridScalar {
    let values: Vec<f64> = m.values().iter().map(|mat| mat.det()).collect();
    Grid2::new(m.nx(), m.ny(), m.h(), m.origin(), values).expect("same grid")
}

/// Bumps per axis in the fixed weak-test family.
pub const BUMP_GRID: usize = 3;

/// One weak-form pairing: row index (1 or 2), bump cell, quadrature value.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakValue {
    pub row: usize,
    pub bump: (usize, usize),
    pub value: f64,
}

/// Strong and weak curl residuals of a matrix field.
#[derive(Debug, Clone)]
pub struct CurlResidual {
    /// Strong residual per row index of the field.
    pub strong: [GridScalar; 2],
    /// Weak pairings against the 3x3 bump family, 9 per row.
    pub weak: Vec<WeakValue>,
    /// Discrete L2 norm of the strong residual over both rows.
    pub l2: f64,
    /// Max-norm of the strong residual.
    pub linf: f64,
}

impl CurlResidual {
    pub fn weak_max(&self) -> f64 {
        self.weak.iter().map(|w| w.value.abs()).fold(0.0, f64::max)
    }
}

/// C2 tensor-product bump profile supported on `|t| < 1`. The extra
/// smoothness at the support edge matters: with a mere C1 profile the
/// midpoint quadrature picks up an O(h^2) edge artifact even on constant
/// fields.
fn bump1(t: f64) -> f64 {
    let s = 1.0 - t * t;
    if s <= 0.0 {
        0.0
    } else {
        s * s * s
    }
}

fn bump1_prime(t: f64) -> f64 {
    let s = 1.0 - t * t;
    if s <= 0.0 {
        0.0
    } else {
        -6.0 * t * s * s
    }
}

struct Bump {
    center: Vec2,
    radius: f64,
}

impl Bump {
    fn value(&self, p: Vec2) -> f64 {
        bump1((p.x - self.center.x) / self.radius) * bump1((p.y - self.center.y) / self.radius)
    }

    fn grad(&self, p: Vec2) -> Vec2 {
        let tx = (p.x - self.center.x) / self.radius;
        let ty = (p.y - self.center.y) / self.radius;
        Vec2::new(
            bump1_prime(tx) * bump1(ty) / self.radius,
            bump1(tx) * bump1_prime(ty) / self.radius,
        )
    }
}

/// The 3x3 bump family for a given grid: centers at the quarter points of
/// the rectangle, radius a quarter of the smaller extent (supports stay
/// inside the domain).
fn bump_family<T: super::grid::NodeValue>(field: &Grid2<T>) -> Vec<((usize, usize), Bump)> {
    let (lx, ly) = field.extent();
    let o = field.origin();
    let radius = 0.25 * lx.min(ly);
    let mut out = Vec::with_capacity(BUMP_GRID * BUMP_GRID);
    for by in 0..BUMP_GRID {
        for bx in 0..BUMP_GRID {
            let center = Vec2::new(
                o.x + lx * 0.25 * (bx as f64 + 1.0),
                o.y + ly * 0.25 * (by as f64 + 1.0),
            );
            out.push(((bx, by), Bump { center, radius }));
        }
    }
    out
}

/// Strong and weak curl residuals of `m`.
pub fn weak_curl_residual(m: &MatrixField2) -> CurlResidual {
    let (nx, ny, h) = (m.nx(), m.ny(), m.h());
    let mut strong = Vec::with_capacity(2);
    for row in 0..2 {
        let mut values = Vec::with_capacity(nx * ny);
        for iy in 0..ny {
            for ix in 0..nx {
                let r = d1(m, &|mat: Mat2| mat.e[row][1], ix, iy)
                    - d2(m, &|mat: Mat2| mat.e[row][0], ix, iy);
                values.push(r);
            }
        }
        strong.push(Grid2::new(nx, ny, h, m.origin(), values).expect("same grid"));
    }

    let mut l2 = KahanSum::new();
    let mut linf: f64 = 0.0;
    for field in &strong {
        for &v in field.values() {
            l2.add(v * v);
            linf = linf.max(v.abs());
        }
    }
    let l2 = (l2.value() * h * h).sqrt();

    // Weak pairings by midpoint quadrature on grid cells; the field value at
    // a cell center is the average of its four corners.
    let mut weak = Vec::with_capacity(2 * BUMP_GRID * BUMP_GRID);
    for (bump_id, bump) in bump_family(m) {
        let mut acc = [KahanSum::new(), KahanSum::new()];
        for iy in 0..ny - 1 {
            for ix in 0..nx - 1 {
                let center = Vec2::new(
                    m.origin().x + (ix as f64 + 0.5) * h,
                    m.origin().y + (iy as f64 + 0.5) * h,
                );
                let dphi = bump.grad(center);
                if dphi.x == 0.0 && dphi.y == 0.0 && bump.value(center) == 0.0 {
                    continue;
                }
                let avg = m
                    .at(ix, iy)
                    .add(&m.at(ix + 1, iy))
                    .add(&m.at(ix, iy + 1))
                    .add(&m.at(ix + 1, iy + 1))
                    .scale(0.25);
                for (row, a) in acc.iter_mut().enumerate() {
                    a.add((avg.e[row][0] * dphi.y - avg.e[row][1] * dphi.x) * h * h);
                }
            }
        }
        for (row, a) in acc.iter().enumerate() {
            weak.push(WeakValue {
                row: row + 1,
                bump: bump_id,
                value: a.value(),
            });
        }
    }

    CurlResidual {
        strong: [strong.remove(0), strong.remove(0)],
        weak,
        l2,
        linf,
    }
}

/// Euler-Lagrange residual of a sampled map: the curl residual of the field
/// `g'(det Du) Du`. Constant-determinant maps are in the kernel of the
/// continuum operator.
pub fn el_residual(gi: &ConvexIntegrand, u: &VectorField2) -> CurlResidual {
    let du = gradient_field(u);
    let values: Vec<Mat2> = du
        .values()
        .iter()
        .map(|m| m.scale(gi.g1(m.det())))
        .collect();
    let field = Grid2::new(u.nx(), u.ny(), u.h(), u.origin(), values).expect("same grid");
    weak_curl_residual(&field)
}
