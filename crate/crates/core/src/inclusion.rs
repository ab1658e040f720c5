//! Lifting maps into the stationary inclusion set and computable membership
//! surrogates.
//!
//! A 2x2 matrix `X` lifts to the 6x2 stack
//! `(X; g'(det X) X; h(det X) J)` — the generic element of the stationary
//! set for the integrand `g` — and to the 4x2 stack `(X; g'(det X) X)` for
//! the first-order set. Membership of an arbitrary stack is probed by the
//! fiber residual (exactly zero on the set, cheap to evaluate) and by a
//! multistart descent estimate of the Frobenius distance. The fiber residual
//! is *not* the Euclidean distance to the set; it is the primary membership
//! metric here because it vanishes exactly on the set.

use rand::Rng;

use crate::algebra::{Mat2, Stacked42, Stacked62, J};
use crate::integrand::ConvexIntegrand;

/// A stack together with the matrix it was lifted from.
#[derive(Debug, Clone, Copy)]
pub struct LiftedMatrix {
    pub value: Stacked62,
    pub source: Mat2,
    pub det_source: f64,
}

/// Lift into the stationary set: `(X; g'(det X) X; h(det X) J)`.
pub fn lift(gi: &ConvexIntegrand, x: &Mat2) -> LiftedMatrix {
    let d = x.det();
    LiftedMatrix {
        value: Stacked62::new(*x, x.scale(gi.g1(d)), J.scale(gi.h(d))),
        source: *x,
        det_source: d,
    }
}

/// Lift into the first-order set: `(X; g'(det X) X)`.
pub fn lift4(gi: &ConvexIntegrand, x: &Mat2) -> Stacked42 {
    Stacked42 {
        top: *x,
        bot: x.scale(gi.g1(x.det())),
    }
}

/// Blockwise deviation of a stack from the fiber over its own top block.
/// `total = 0` exactly when the stack lies on the stationary set.
#[derive(Debug, Clone, Copy)]
pub struct FiberResidual {
    pub r_mid: f64,
    pub r_bot: f64,
    pub total: f64,
}

/// `r_mid = |A.mid - g'(det A.top) A.top|_F`,
/// `r_bot = |A.bot - h(det A.top) J|_F`, `total = r_mid + r_bot`.
pub fn fiber_residual(gi: &ConvexIntegrand, a: &Stacked62) -> FiberResidual {
    let d = a.top.det();
    let r_mid = a.mid.sub(&a.top.scale(gi.g1(d))).frobenius();
    let r_bot = a.bot.sub(&J.scale(gi.h(d))).frobenius();
    FiberResidual {
        r_mid,
        r_bot,
        total: r_mid + r_bot,
    }
}

/// Frobenius distance from `a` to the lift of `x`.
fn lift_gap(gi: &ConvexIntegrand, a: &Stacked62, x: &Mat2) -> f64 {
    a.sub(&lift(gi, x).value).frobenius()
}

/// Upper bound on the Frobenius distance from `a` to the stationary set:
/// the best of `multistart` derivative-free coordinate-descent runs over the
/// 4-dimensional source space. Run 1 starts at `a.top`, so the estimate
/// never exceeds `|a - lift(a.top)|_F`. Deterministic for a fixed generator
/// state.
pub fn distance_estimate(
    gi: &ConvexIntegrand,
    a: &Stacked62,
    multistart: usize,
    rng: &mut impl Rng,
) -> f64 {
    assert!(multistart >= 1, "multistart must be >= 1");
    let scale = 1.0 + a.top.frobenius();
    let mut best = f64::INFINITY;
    for start in 0..multistart {
        let x0 = if start == 0 {
            a.top
        } else {
            let mut x = a.top;
            for i in 0..2 {
                for j in 0..2 {
                    x.e[i][j] += scale * rng.gen_range(-1.0..1.0);
                }
            }
            x
        };
        best = best.min(coordinate_descent(gi, a, x0));
    }
    best
}

/// Coordinate search with shrinking step: initial 0.5, factor 0.5,
/// 40 shrink levels.
fn coordinate_descent(gi: &ConvexIntegrand, a: &Stacked62, x0: Mat2) -> f64 {
    let mut x = x0;
    let mut f = lift_gap(gi, a, &x);
    let mut step = 0.5;
    for _ in 0..40 {
        loop {
            let mut improved = false;
            for i in 0..2 {
                for j in 0..2 {
                    for sign in [1.0, -1.0] {
                        let mut trial = x;
                        trial.e[i][j] += sign * step;
                        let ft = lift_gap(gi, a, &trial);
                        if ft < f {
                            x = trial;
                            f = ft;
                            improved = true;
                        }
                    }
                }
            }
            if !improved {
                break;
            }
        }
        step *= 0.5;
    }
    f
}
