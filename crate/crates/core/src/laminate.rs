//! Two-phase oscillating piecewise-affine maps on the unit disc.
//!
//! Given matrices `A`, `B` with determinant one and a rank-one gap
//! `B - A = amp (x) dir`, the map
//!
//! ```text
//! u(x) = C x + amp * S(n (x . dir)) / n * chi(x),    C = lambda A + (1-lambda) B
//! ```
//!
//! oscillates between gradient `A` (on a `lambda` fraction of each period)
//! and gradient `B` elsewhere. `S` is the 1-periodic continuous sawtooth
//! with slope `-(1-lambda)` on the `A` intervals and `+lambda` on the `B`
//! intervals, and `chi` is a radial Lipschitz cutoff equal to 1 on the disc
//! of radius `1 - collar` and 0 outside the unit disc, `collar = 1/(4 n)`.
//!
//! On the phase region (`chi = 1`) the gradient is exactly `A` or `B`, so
//! the determinant is exactly one there; the collar annulus trades exact
//! determinants for a clean boundary value, and its area `<= pi/(2n)` keeps
//! the phase-fraction bounds intact. Shear pairs (`amp . dir = 0`) are
//! required: for those, `det(C + t amp (x) dir) = 1` for every `t`, so the
//! sawtooth interpolation never leaves the determinant-one surface inside
//! the phase region. Rank-one pairs with equal determinant but
//! `amp . dir != 0` are rejected rather than approximated.

use rand::Rng;
use thiserror::Error;

use crate::algebra::{rank_one_gap, Mat2, Stacked62, Vec2, J};
use crate::inclusion::fiber_residual;
use crate::integrand::ConvexIntegrand;
use crate::pde::{Grid2, MatrixField2};
use crate::KahanSum;

#[derive(Debug, Error, PartialEq)]
pub enum LaminateError {
    #[error("not rank-one connected: rank(A - B) = {0}")]
    NotRankOneConnected(usize),
    #[error("determinants differ: det A = {0}, det B = {1}")]
    DeterminantsDiffer(f64, f64),
    #[error("determinant not 1: det = {0}")]
    DeterminantNotOne(f64),
    #[error("lambda must lie in (0,1), got {0}")]
    LambdaOutOfRange(f64),
    #[error("pair not shear-type: amp . dir = {0:e}")]
    NotShearType(f64),
    #[error("oscillation count must be >= 1, got {0}")]
    OscillationCount(usize),
}

/// Validated two-phase data: `det A = det B = 1`, `B - A = amp (x) dir`
/// with `|dir| = 1`, and the weighted midpoint `C = lambda A + (1-lambda) B`.
#[derive(Debug, Clone, Copy)]
pub struct LaminatePair {
    pub a: Mat2,
    pub b: Mat2,
    pub lambda: f64,
    pub amp: Vec2,
    pub dir: Vec2,
    pub c: Mat2,
}

const DET_TOL: f64 = 1e-12;

/// Validates a candidate pair: rank-one connectedness first, then equal
/// determinants, then determinant one, then the weight range.
pub fn check_pair(a: &Mat2, b: &Mat2, lambda: f64) -> Result<LaminatePair, LaminateError> {
    let gap = rank_one_gap(a, b);
    if gap.rank != 1 {
        return Err(LaminateError::NotRankOneConnected(gap.rank));
    }
    let (da, db) = (a.det(), b.det());
    if (da - db).abs() > DET_TOL {
        return Err(LaminateError::DeterminantsDiffer(da, db));
    }
    if (da - 1.0).abs() > DET_TOL {
        return Err(LaminateError::DeterminantNotOne(da));
    }
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(LaminateError::LambdaOutOfRange(lambda));
    }
    let (amp, dir) = gap.factors.expect("rank-one gap has factors");
    let c = a.scale(lambda).add(&b.scale(1.0 - lambda));
    Ok(LaminatePair {
        a: *a,
        b: *b,
        lambda,
        amp,
        dir,
        c,
    })
}

impl LaminatePair {
    /// The stock example: identity against the unit shear, equal weights.
    pub fn default_shear() -> LaminatePair {
        check_pair(&Mat2::identity(), &Mat2::new(1.0, 1.0, 0.0, 1.0), 0.5)
            .expect("stock pair is valid")
    }

    pub fn is_shear(&self) -> bool {
        self.amp.dot(self.dir).abs() <= 1e-12 * (1.0 + self.amp.norm())
    }
}

/// The oscillating map `u` for one `n_osc`, with its evaluators.
#[derive(Debug, Clone, Copy)]
pub struct LaminateMap {
    pub pair: LaminatePair,
    pub n_osc: usize,
    pub collar: f64,
}

/// Sawtooth value and slope at phase coordinate `xi` (argument of `S`).
fn sawtooth(lambda: f64, xi: f64) -> (f64, f64, bool) {
    let frac = xi - xi.floor();
    if frac < lambda {
        (-(1.0 - lambda) * frac, -(1.0 - lambda), true)
    } else {
        (
            -lambda * (1.0 - lambda) + lambda * (frac - lambda),
            lambda,
            false,
        )
    }
}

/// Builds the laminate map. Requires a shear pair (`amp . dir = 0`) so the
/// phase region carries determinant one exactly; the sup-norm deviation from
/// `C x` is at most `|amp| lambda (1-lambda) / n_osc <= 1/n_osc` for
/// `|amp| <= 2`.
pub fn build_laminate(pair: &LaminatePair, n_osc: usize) -> Result<LaminateMap, LaminateError> {
    if !pair.is_shear() {
        return Err(LaminateError::NotShearType(pair.amp.dot(pair.dir)));
    }
    if n_osc < 1 {
        return Err(LaminateError::OscillationCount(n_osc));
    }
    Ok(LaminateMap {
        pair: *pair,
        n_osc,
        collar: 1.0 / (4.0 * n_osc as f64),
    })
}

impl LaminateMap {
    /// Radial cutoff: 1 on radius `<= 1 - collar`, 0 at radius 1, linear in
    /// between.
    pub fn chi(&self, x: Vec2) -> f64 {
        ((1.0 - x.norm()) / self.collar).clamp(0.0, 1.0)
    }

    pub fn eval(&self, x: Vec2) -> Vec2 {
        let n = self.n_osc as f64;
        let (s, _, _) = sawtooth(self.pair.lambda, n * x.dot(self.pair.dir));
        self.pair
            .c
            .mul_vec(x)
            .add(self.pair.amp.scale(s / n * self.chi(x)))
    }

    /// Pointwise gradient, defined away from the sawtooth interfaces and the
    /// two cutoff circles (one-sided values on those null sets). Exactly `A`
    /// or `B` on the phase region.
    pub fn gradient_at(&self, x: Vec2) -> Mat2 {
        let n = self.n_osc as f64;
        let r = x.norm();
        let (s, sp, phase_a) = sawtooth(self.pair.lambda, n * x.dot(self.pair.dir));
        if r <= 1.0 - self.collar {
            return if phase_a { self.pair.a } else { self.pair.b };
        }
        let chi = ((1.0 - r) / self.collar).clamp(0.0, 1.0);
        let mut du = self
            .pair
            .c
            .add(&self.pair.amp.outer(self.pair.dir).scale(chi * sp));
        if r < 1.0 && r > 0.0 {
            let dchi = x.scale(-1.0 / (self.collar * r));
            du = du.add(&self.pair.amp.outer(dchi).scale(s / n));
        }
        du
    }

    /// True on the phase region where the gradient is exactly a phase matrix.
    pub fn in_phase_region(&self, x: Vec2) -> bool {
        x.norm() <= 1.0 - self.collar
    }
}

/// Analytic-where-possible gradient sampling on an `grid_n x grid_n` grid
/// over `[-1,1]^2`. Away from interfaces the exact per-strip slope is used;
/// nodes inside the collar, or whose difference stencil straddles a sawtooth
/// kink or a cutoff circle, fall back to centered differences of the map
/// itself (the averaged values land in neither phase, so interface cells
/// show up as "other" in phase statistics).
pub fn sample_gradient(lam: &LaminateMap, grid_n: usize) -> MatrixField2 {
    assert!(grid_n >= 8, "grid_n must be >= 8");
    const FD_STEP: f64 = 1e-6;
    let n = lam.n_osc as f64;
    let h = 2.0 / (grid_n as f64 - 1.0);
    Grid2::sample(grid_n, grid_n, h, Vec2::new(-1.0, -1.0), |x| {
        let r = x.norm();
        let clear_of_cutoff = r < 1.0 - lam.collar - 2.0 * FD_STEP;
        let xi = n * x.dot(lam.pair.dir);
        let frac = xi - xi.floor();
        let kink_dist = frac.min((frac - lam.pair.lambda).abs()).min(1.0 - frac);
        let clear_of_kinks = kink_dist > 2.0 * n * FD_STEP;
        if clear_of_cutoff && clear_of_kinks {
            lam.gradient_at(x)
        } else {
            fd_gradient(lam, x, FD_STEP)
        }
    })
    .expect("laminate sampling grid is valid")
}

fn fd_gradient(lam: &LaminateMap, x: Vec2, eps: f64) -> Mat2 {
    let dx = lam
        .eval(Vec2::new(x.x + eps, x.y))
        .sub(lam.eval(Vec2::new(x.x - eps, x.y)))
        .scale(0.5 / eps);
    let dy = lam
        .eval(Vec2::new(x.x, x.y + eps))
        .sub(lam.eval(Vec2::new(x.x, x.y - eps)))
        .scale(0.5 / eps);
    Mat2::new(dx.x, dy.x, dx.y, dy.y)
}

impl LaminateMap {
    fn lambda(&self) -> f64 {
        self.pair.lambda
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseFractions {
    pub frac_a: f64,
    pub frac_b: f64,
    pub frac_other: f64,
}

/// Classifies sampled gradients against the two phase matrices. Only nodes
/// inside the disc inscribed in the grid rectangle are counted (the disc is
/// the domain of interest; the rectangle is just its bounding sample box).
/// Fractions sum to one.
pub fn phase_statistics(field: &MatrixField2, a: &Mat2, b: &Mat2, tol: f64) -> PhaseFractions {
    assert!(tol > 0.0, "tolerance must be positive");
    let (lx, ly) = field.extent();
    let center = Vec2::new(field.origin().x + 0.5 * lx, field.origin().y + 0.5 * ly);
    let radius = 0.5 * lx.min(ly);
    let mut inside = 0usize;
    let mut in_a = 0usize;
    let mut in_b = 0usize;
    for iy in 0..field.ny() {
        for ix in 0..field.nx() {
            let p = field.node_pos(ix, iy);
            if p.sub(center).norm() > radius {
                continue;
            }
            inside += 1;
            let m = field.at(ix, iy);
            if m.sub(a).frobenius() <= tol {
                in_a += 1;
            } else if m.sub(b).frobenius() <= tol {
                in_b += 1;
            }
        }
    }
    let inside = inside.max(1) as f64;
    let frac_a = in_a as f64 / inside;
    let frac_b = in_b as f64 / inside;
    PhaseFractions {
        frac_a,
        frac_b,
        frac_other: 1.0 - frac_a - frac_b,
    }
}

/// Uniform sample from the unit disc by rejection.
fn sample_disc(rng: &mut impl Rng) -> Vec2 {
    loop {
        let p = Vec2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if p.dot(p) < 1.0 {
            return p;
        }
    }
}

/// Monte-Carlo phase fractions over the unit disc (the sampled fraction of
/// points whose gradient matches a phase equals the area fraction relative
/// to `|B_1|`).
pub fn mc_phase_fractions(
    lam: &LaminateMap,
    tol: f64,
    samples: usize,
    rng: &mut impl Rng,
) -> PhaseFractions {
    let mut in_a = 0usize;
    let mut in_b = 0usize;
    for _ in 0..samples {
        let p = sample_disc(rng);
        let m = lam.gradient_at(p);
        if m.sub(&lam.pair.a).frobenius() <= tol {
            in_a += 1;
        } else if m.sub(&lam.pair.b).frobenius() <= tol {
            in_b += 1;
        }
    }
    let frac_a = in_a as f64 / samples as f64;
    let frac_b = in_b as f64 / samples as f64;
    PhaseFractions {
        frac_a,
        frac_b,
        frac_other: 1.0 - frac_a - frac_b,
    }
}

/// Monte-Carlo sup-norm deviation `max |u(x) - C x|` over the unit disc.
pub fn mc_sup_deviation(lam: &LaminateMap, samples: usize, rng: &mut impl Rng) -> f64 {
    let mut sup: f64 = 0.0;
    for _ in 0..samples {
        let p = sample_disc(rng);
        let dev = lam.eval(p).sub(lam.pair.c.mul_vec(p)).norm();
        sup = sup.max(dev);
    }
    sup
}

/// Maximum determinant error `|det Du - det C|` over Monte-Carlo samples of
/// the phase region.
pub fn mc_phase_region_det_error(lam: &LaminateMap, samples: usize, rng: &mut impl Rng) -> f64 {
    let det_c = lam.pair.c.det();
    let mut worst: f64 = 0.0;
    let mut seen = 0usize;
    while seen < samples {
        let p = sample_disc(rng);
        if !lam.in_phase_region(p) {
            continue;
        }
        seen += 1;
        worst = worst.max((lam.gradient_at(p).det() - det_c).abs());
    }
    worst
}

// ---------------------------------------------------------------------------
// Deterministic quadrature statistics.
//
// Midpoint rules in polar coordinates. The sawtooth has at most
// 2 pi r n_osc kink crossings around a circle of radius r, so the default
// angular resolutions below keep tens of sample points per oscillation for
// every n_osc used in the experiments.
// ---------------------------------------------------------------------------

/// Default radial x angular resolution for full-disc quadratures.
pub const DISC_QUAD: (usize, usize) = (512, 4096);
/// Default radial x angular resolution for collar-only quadratures.
pub const COLLAR_QUAD: (usize, usize) = (64, 8192);

/// Midpoint quadrature of `f` over the annulus `r0 <= |x| <= r1`.
fn polar_integral(
    r0: f64,
    r1: f64,
    radial: usize,
    angular: usize,
    mut f: impl FnMut(Vec2) -> f64,
) -> f64 {
    let dr = (r1 - r0) / radial as f64;
    let dth = std::f64::consts::TAU / angular as f64;
    let mut acc = KahanSum::new();
    for i in 0..radial {
        let r = r0 + (i as f64 + 0.5) * dr;
        let w = r * dr * dth;
        for j in 0..angular {
            let th = (j as f64 + 0.5) * dth;
            acc.add(w * f(Vec2::new(r * th.cos(), r * th.sin())));
        }
    }
    acc.value()
}

/// `L^1` determinant error over the whole disc,
/// `int_{B_1} |det Du - det C|`. The phase region contributes the exact
/// per-phase constants; only the collar annulus needs quadrature.
pub fn l1_det_error(lam: &LaminateMap, radial: usize, angular: usize) -> f64 {
    let det_c = lam.pair.c.det();
    let rho = 1.0 - lam.collar;
    let phase_area = std::f64::consts::PI * rho * rho;
    let lambda = lam.lambda();
    let phase_term = phase_area
        * (lambda * (lam.pair.a.det() - det_c).abs()
            + (1.0 - lambda) * (lam.pair.b.det() - det_c).abs());
    let collar_term = polar_integral(rho, 1.0, radial, angular, |x| {
        (lam.gradient_at(x).det() - det_c).abs()
    });
    phase_term + collar_term
}

/// `L^1` determinant error over the half-radius disc `B_{1/2}`, which lies
/// entirely in the phase region for every `n_osc >= 1`.
pub fn interior_l1_det_error(lam: &LaminateMap, radial: usize, angular: usize) -> f64 {
    let det_c = lam.pair.c.det();
    polar_integral(0.0, 0.5, radial, angular, |x| {
        (lam.gradient_at(x).det() - det_c).abs()
    })
}

/// Mean fiber residual over the disc of the lifted laminate gradient field
/// `(Du; g'(det C) Du; h(det C) J)`.
pub fn mean_fiber_residual(
    gi: &ConvexIntegrand,
    lam: &LaminateMap,
    radial: usize,
    angular: usize,
) -> f64 {
    let det_c = lam.pair.c.det();
    let g1c = gi.g1(det_c);
    let hc = gi.h(det_c);
    let residual_at = |m: &Mat2| {
        let stack = Stacked62::new(*m, m.scale(g1c), J.scale(hc));
        fiber_residual(gi, &stack).total
    };
    let rho = 1.0 - lam.collar;
    let phase_area = std::f64::consts::PI * rho * rho;
    let lambda = lam.lambda();
    let phase_term = phase_area
        * (lambda * residual_at(&lam.pair.a) + (1.0 - lambda) * residual_at(&lam.pair.b));
    let collar_term = polar_integral(rho, 1.0, radial, angular, |x| {
        residual_at(&lam.gradient_at(x))
    });
    (phase_term + collar_term) / std::f64::consts::PI
}

/// `int_{B_1} |Du - C|_F`, the non-compactness witness; stays of order
/// `2 lambda (1-lambda) |amp| |B_1|` no matter how fast the oscillation.
pub fn l1_gradient_gap(lam: &LaminateMap, radial: usize, angular: usize) -> f64 {
    polar_integral(0.0, 1.0, radial, angular, |x| {
        lam.gradient_at(x).sub(&lam.pair.c).frobenius()
    })
}

/// The fixed averaging test function `phi(x) = (1 - |x|^2)_+^2`.
pub fn bump(x: Vec2) -> f64 {
    let t = (1.0 - x.dot(x)).max(0.0);
    t * t
}

fn bump_gradient(x: Vec2) -> Vec2 {
    let t = 1.0 - x.dot(x);
    if t <= 0.0 {
        Vec2::new(0.0, 0.0)
    } else {
        x.scale(-4.0 * t)
    }
}

/// Weak-convergence pairing `|int phi (Du - C)|_F` for the bump above,
/// evaluated two ways: by parts as `|int (u - Cx) (x) Dphi|_F` (exact for
/// Lipschitz maps, smooth integrand) and directly on the oscillating
/// gradient. Returns `(by_parts, direct)`.
pub fn weak_bump_pairing(lam: &LaminateMap, radial: usize, angular: usize) -> (f64, f64) {
    let mut by_parts = [[KahanSum::new(); 2]; 2];
    let mut direct = [[KahanSum::new(); 2]; 2];
    let dr = 1.0 / radial as f64;
    let dth = std::f64::consts::TAU / angular as f64;
    for i in 0..radial {
        let r = (i as f64 + 0.5) * dr;
        let w = r * dr * dth;
        for j in 0..angular {
            let th = (j as f64 + 0.5) * dth;
            let x = Vec2::new(r * th.cos(), r * th.sin());
            let osc = lam.eval(x).sub(lam.pair.c.mul_vec(x));
            let dphi = bump_gradient(x);
            let phi = bump(x);
            let gap = lam.gradient_at(x).sub(&lam.pair.c);
            for (bi, row) in by_parts.iter_mut().enumerate() {
                let u_i = if bi == 0 { osc.x } else { osc.y };
                row[0].add(-w * u_i * dphi.x);
                row[1].add(-w * u_i * dphi.y);
            }
            for (bi, row) in direct.iter_mut().enumerate() {
                row[0].add(w * phi * gap.e[bi][0]);
                row[1].add(w * phi * gap.e[bi][1]);
            }
        }
    }
    let norm = |m: &[[KahanSum; 2]; 2]| {
        let mut s = 0.0;
        for row in m {
            for v in row {
                s += v.value() * v.value();
            }
        }
        s.sqrt()
    };
    (norm(&by_parts), norm(&direct))
}

/// Weak pairing against an off-center bump
/// `psi(x) = (1 - |x - c|^2 / rho^2)_+^2` (support inside the disc
/// required). The centered radial bump annihilates the stock oscillation by
/// parity alone, so this is the probe that exposes the genuine O(1/n)
/// averaging rate. Computed by parts; returns `|int psi (Du - C)|_F`.
pub fn weak_offset_pairing(
    lam: &LaminateMap,
    center: Vec2,
    rho: f64,
    radial: usize,
    angular: usize,
) -> f64 {
    assert!(
        center.norm() + rho <= 1.0,
        "bump support must stay inside the disc"
    );
    let psi_grad = |x: Vec2| {
        let d = x.sub(center);
        let t = 1.0 - d.dot(d) / (rho * rho);
        if t <= 0.0 {
            Vec2::new(0.0, 0.0)
        } else {
            d.scale(-4.0 * t / (rho * rho))
        }
    };
    let mut sums = [[KahanSum::new(); 2]; 2];
    let dr = 1.0 / radial as f64;
    let dth = std::f64::consts::TAU / angular as f64;
    for i in 0..radial {
        let r = (i as f64 + 0.5) * dr;
        let w = r * dr * dth;
        for j in 0..angular {
            let th = (j as f64 + 0.5) * dth;
            let x = Vec2::new(r * th.cos(), r * th.sin());
            let osc = lam.eval(x).sub(lam.pair.c.mul_vec(x));
            let dpsi = psi_grad(x);
            sums[0][0].add(-w * osc.x * dpsi.x);
            sums[0][1].add(-w * osc.x * dpsi.y);
            sums[1][0].add(-w * osc.y * dpsi.x);
            sums[1][1].add(-w * osc.y * dpsi.y);
        }
    }
    let mut s = 0.0;
    for row in &sums {
        for v in row {
            s += v.value() * v.value();
        }
    }
    s.sqrt()
}

/// Minor weak-continuity pairing `|int phi (det Du - det C)|` for the same
/// bump; only the collar contributes, and `phi` is tiny there.
pub fn weak_det_pairing(lam: &LaminateMap, radial: usize, angular: usize) -> f64 {
    let det_c = lam.pair.c.det();
    let rho = 1.0 - lam.collar;
    let phase = polar_integral(0.0, rho, radial, angular, |x| {
        bump(x) * (lam.gradient_at(x).det() - det_c)
    });
    let collar = polar_integral(rho, 1.0, radial.min(64), angular, |x| {
        bump(x) * (lam.gradient_at(x).det() - det_c)
    });
    (phase + collar).abs()
}
