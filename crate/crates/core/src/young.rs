//! Atomic probability measures on 6x2 matrix space and their minor moment
//! algebra.
//!
//! A measure is *polyconvex* when every one of the fifteen 2x2 minor
//! functions commutes with taking the barycenter:
//! `<mu, Det_ij> = Det_ij(<mu, id>)`. Because each minor is a quadratic
//! form, that is equivalent to the vanishing of the pairwise form
//! `sum_kl w_k w_l Det_ij(atom_k - atom_l)` (the polar expansion gives
//! exactly twice the moment gap). [`polyconvexity_gap`] reports both routes.
//!
//! For measures supported on the stationary inclusion set of an integrand,
//! polyconvexity forces all atoms onto a single determinant fiber. The
//! two-atom sweep [`two_atom_search`] probes this mechanism at desk scale:
//! place one atom on each fiber of a positive level of `h`, sweep the weight
//! `t`, and record which weights satisfy the full minor moment system. The
//! forcing identity is the discriminant `(g'(e1) - g'(e2))^2 > 0`, which
//! kills every strictly mixed weight; only `t = 0` and `t = 1` survive.
//!
//! Context for the surrogate: gradient oscillation statistics are recorded
//! by probability measures, and set hulls are cut out by separating function
//! classes ordered as polyconvex => quasiconvex => rank-one convex, so the
//! hulls nest as `K` within rank-one within quasi within polyconvex hulls.
//! Minor moment relations are the computable polyconvex layer of that
//! chain; nothing here computes or decides a quasiconvex hull.

use rand::Rng;
use thiserror::Error;

use crate::algebra::{minor_det, Mat2, MinorIndex, Stacked62, Vec2};
use crate::inclusion::{fiber_residual, lift};
use crate::integrand::{ConvexIntegrand, IntegrandError};

#[derive(Debug, Error)]
pub enum YoungError {
    #[error("weights and atoms differ in length: {atoms} atoms, {weights} weights")]
    LengthMismatch { atoms: usize, weights: usize },
    #[error("measure needs at least one atom")]
    Empty,
    #[error("negative weight {0}")]
    NegativeWeight(f64),
    #[error("weights sum to {0}, not 1 (tolerance 1e-12)")]
    WeightSum(f64),
    #[error("atoms {0} and {1} coincide")]
    DuplicateAtoms(usize, usize),
    #[error("no fiber roots at level {0}")]
    NoFiberRoots(f64),
    #[error("representative determinant {got} does not match fiber root {want}")]
    RepresentativeDeterminant { got: f64, want: f64 },
    #[error(transparent)]
    Integrand(#[from] IntegrandError),
}

/// Finitely supported probability measure on 6x2 matrix space.
#[derive(Debug, Clone)]
pub struct AtomicMeasure {
    atoms: Vec<Stacked62>,
    weights: Vec<f64>,
}

impl AtomicMeasure {
    /// Validates weights (nonnegative, unit sum within 1e-12) and pairwise
    /// distinct atoms.
    pub fn new(atoms: Vec<Stacked62>, weights: Vec<f64>) -> Result<Self, YoungError> {
        if atoms.len() != weights.len() {
            return Err(YoungError::LengthMismatch {
                atoms: atoms.len(),
                weights: weights.len(),
            });
        }
        if atoms.is_empty() {
            return Err(YoungError::Empty);
        }
        let mut sum = 0.0;
        for &w in &weights {
            if w < 0.0 {
                return Err(YoungError::NegativeWeight(w));
            }
            sum += w;
        }
        if (sum - 1.0).abs() > 1e-12 {
            return Err(YoungError::WeightSum(sum));
        }
        for i in 0..atoms.len() {
            for j in (i + 1)..atoms.len() {
                if atoms[i].sub(&atoms[j]).frobenius() <= 1e-14 {
                    return Err(YoungError::DuplicateAtoms(i, j));
                }
            }
        }
        Ok(Self { atoms, weights })
    }

    pub fn dirac(atom: Stacked62) -> Self {
        Self {
            atoms: vec![atom],
            weights: vec![1.0],
        }
    }

    pub fn atoms(&self) -> &[Stacked62] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn max_atom_norm(&self) -> f64 {
        self.atoms.iter().map(|a| a.frobenius()).fold(0.0, f64::max)
    }
}

/// `<mu, id>`: the weighted sum of the atoms.
pub fn barycenter(mu: &AtomicMeasure) -> Stacked62 {
    let mut acc = Stacked62::default();
    for (atom, &w) in mu.atoms.iter().zip(&mu.weights) {
        acc = acc.add(&atom.scale(w));
    }
    acc
}

/// `<mu, Det_ij>`: the weighted sum of one minor over the atoms.
pub fn minor_moment(mu: &AtomicMeasure, idx: MinorIndex) -> f64 {
    mu.atoms
        .iter()
        .zip(&mu.weights)
        .map(|(atom, &w)| w * minor_det(atom, idx))
        .sum()
}

/// Moment-commutation report: per-minor gaps between moments and barycenter
/// minors, and the pairwise quadratic form, in [`MinorIndex::all`] order.
#[derive(Debug, Clone)]
pub struct MomentReport {
    pub barycenter: Stacked62,
    pub minor_gaps: Vec<f64>,
    pub pairwise_gaps: Vec<f64>,
    pub max_gap: f64,
}

/// Evaluates all fifteen minor relations. For each index pair the moment gap
/// `|<mu, Det_ij> - Det_ij(<mu, id>)|` and the pairwise form
/// `|sum_kl w_k w_l Det_ij(atom_k - atom_l)|` are reported; the latter is
/// exactly twice the former by the polar expansion of the determinant.
pub fn polyconvexity_gap(mu: &AtomicMeasure) -> MomentReport {
    let bary = barycenter(mu);
    let mut minor_gaps = Vec::with_capacity(15);
    let mut pairwise_gaps = Vec::with_capacity(15);
    let mut max_gap: f64 = 0.0;
    for idx in MinorIndex::all() {
        let gap = (minor_moment(mu, idx) - minor_det(&bary, idx)).abs();
        let mut pairwise = 0.0;
        for (ak, &wk) in mu.atoms.iter().zip(&mu.weights) {
            for (al, &wl) in mu.atoms.iter().zip(&mu.weights) {
                pairwise += wk * wl * minor_det(&ak.sub(al), idx);
            }
        }
        let pairwise = pairwise.abs();
        max_gap = max_gap.max(gap).max(pairwise);
        minor_gaps.push(gap);
        pairwise_gaps.push(pairwise);
    }
    MomentReport {
        barycenter: bary,
        minor_gaps,
        pairwise_gaps,
        max_gap,
    }
}

/// Support diagnosis of a measure against the stationary set of `gi`.
#[derive(Debug, Clone, Copy)]
pub struct FiberSupport {
    /// Every atom has fiber residual at most `tol`.
    pub on_set: bool,
    /// Additionally, all top-block determinants agree within `tol`.
    pub single_fiber: bool,
    /// The common determinant (weighted mean) when `single_fiber` holds.
    pub common_det: Option<f64>,
}

/// Checks whether the measure is supported on the stationary set and, if
/// so, whether the support sits on a single determinant fiber. For
/// polyconvex measures on the set the single fiber is forced.
pub fn fiber_support_check(gi: &ConvexIntegrand, mu: &AtomicMeasure, tol: f64) -> FiberSupport {
    assert!(tol > 0.0, "tolerance must be positive");
    let on_set = mu.atoms.iter().all(|a| fiber_residual(gi, a).total <= tol);
    if !on_set {
        return FiberSupport {
            on_set,
            single_fiber: false,
            common_det: None,
        };
    }
    let dets: Vec<f64> = mu.atoms.iter().map(|a| a.top.det()).collect();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &d in &dets {
        lo = lo.min(d);
        hi = hi.max(d);
    }
    let single_fiber = hi - lo <= tol;
    let common_det = if single_fiber {
        Some(
            dets.iter()
                .zip(&mu.weights)
                .map(|(d, w)| d * w)
                .sum::<f64>(),
        )
    } else {
        None
    };
    FiberSupport {
        on_set,
        single_fiber,
        common_det,
    }
}

/// Outcome of the two-atom weight sweep at one level.
#[derive(Debug, Clone)]
pub struct TwoAtomSearch {
    pub level: f64,
    pub e1: f64,
    pub e2: f64,
    /// `(g'(e1) - g'(e2))^2`, the quantity whose positivity excludes mixed
    /// weights.
    pub discriminant: f64,
    /// Weights passing the full minor moment system.
    pub admissible: Vec<f64>,
    /// Weights passing the reduced scalar system
    /// `I = lambda m`, `L = lambda^2 m` (representative independent).
    pub lambda_admissible: Vec<f64>,
    /// `max_gap` of the swept measures, one per grid weight.
    pub max_gaps: Vec<f64>,
}

/// Relative tolerance for the moment-system consistency checks.
const ADMISSIBLE_RTOL: f64 = 1e-9;

/// Sweeps two-atom measures with one atom on each fiber of `h = level`,
/// using canonical diagonal representatives `diag(e, 1)`. Returns the
/// weights admissible for the full minor moment system; the rigidity
/// prediction is exactly `{0, 1}`.
pub fn two_atom_search(
    gi: &ConvexIntegrand,
    level: f64,
    grid: usize,
) -> Result<TwoAtomSearch, YoungError> {
    let (e1, e2) = fiber_pair(gi, level)?;
    let x1 = Mat2::diag(e1, 1.0);
    let x2 = Mat2::diag(e2, 1.0);
    two_atom_search_with_reps(gi, level, grid, &x1, &x2)
}

/// The same sweep on caller-chosen fiber representatives (their determinants
/// must match the fiber roots). Used to confirm that admissibility does not
/// depend on the canonical diagonal choice.
pub fn two_atom_search_with_reps(
    gi: &ConvexIntegrand,
    level: f64,
    grid: usize,
    x1: &Mat2,
    x2: &Mat2,
) -> Result<TwoAtomSearch, YoungError> {
    assert!(grid >= 10, "grid must be >= 10");
    let (e1, e2) = fiber_pair(gi, level)?;
    for (x, e) in [(x1, e1), (x2, e2)] {
        if (x.det() - e).abs() > 1e-9 * (1.0 + e.abs()) {
            return Err(YoungError::RepresentativeDeterminant {
                got: x.det(),
                want: e,
            });
        }
    }
    let atom1 = lift(gi, x1).value;
    let atom2 = lift(gi, x2).value;
    let (g1e1, g1e2) = (gi.g1(e1), gi.g1(e2));
    let discriminant = (g1e1 - g1e2) * (g1e1 - g1e2);

    let scale = 1.0 + atom1.frobenius().max(atom2.frobenius()).powi(2);
    let gap_tol = ADMISSIBLE_RTOL * scale;

    let mut admissible = Vec::new();
    let mut lambda_admissible = Vec::new();
    let mut max_gaps = Vec::with_capacity(grid + 1);
    for k in 0..=grid {
        let t = k as f64 / grid as f64;
        let s = 1.0 - t;
        let mu = AtomicMeasure::new(vec![atom1, atom2], vec![t, s]).expect("valid sweep measure");
        let report = polyconvexity_gap(&mu);
        max_gaps.push(report.max_gap);
        if report.max_gap <= gap_tol {
            admissible.push(t);
        }
        if lambda_system_consistent(t, e1, e2, g1e1, g1e2) {
            lambda_admissible.push(t);
        }
    }
    Ok(TwoAtomSearch {
        level,
        e1,
        e2,
        discriminant,
        admissible,
        lambda_admissible,
        max_gaps,
    })
}

/// The reduced scalar system: with `m = t e1 + s e2`,
/// `I = t g'(e1) e1 + s g'(e2) e2` and `L = t g'(e1)^2 e1 + s g'(e2)^2 e2`,
/// admissibility requires a single `lambda` with `I = lambda m` and
/// `L = lambda^2 m`.
fn lambda_system_consistent(t: f64, e1: f64, e2: f64, g1e1: f64, g1e2: f64) -> bool {
    let s = 1.0 - t;
    let m = t * e1 + s * e2;
    let i = t * g1e1 * e1 + s * g1e2 * e2;
    let l = t * g1e1 * g1e1 * e1 + s * g1e2 * g1e2 * e2;
    let scale = 1.0 + i.abs().max(l.abs()).max(m.abs());
    if m.abs() <= ADMISSIBLE_RTOL * scale {
        // Then I = lambda m forces I = 0; but I > 0 on the fibers.
        return i.abs() <= ADMISSIBLE_RTOL * scale;
    }
    let lambda = i / m;
    (l - lambda * lambda * m).abs() <= ADMISSIBLE_RTOL * scale * (1.0 + lambda * lambda)
}

fn fiber_pair(gi: &ConvexIntegrand, level: f64) -> Result<(f64, f64), YoungError> {
    if level <= 0.0 {
        return Err(YoungError::NoFiberRoots(level));
    }
    let roots = crate::integrand::fiber_roots_auto(gi, level)?;
    if roots.roots.len() != 2 {
        return Err(YoungError::NoFiberRoots(level));
    }
    Ok((roots.roots[0], roots.roots[1]))
}

/// Random fiber representative: the canonical diagonal bumped by a random
/// determinant-preserving rank-one perturbation (`a` chosen orthogonal to
/// `adj^T(X) n`, so `det(X + a (x) n) = det X` exactly).
pub fn fiber_representative(e: f64, rng: &mut impl Rng) -> Mat2 {
    let x = Mat2::diag(e, 1.0);
    let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let n = Vec2::new(theta.cos(), theta.sin());
    let w = x.cof().transpose().mul_vec(n);
    let wn = w.norm();
    if wn < 1e-12 {
        return x;
    }
    let r: f64 = rng.gen_range(-1.0..1.0);
    let a = w.rot90().scale(r / wn);
    x.add(&a.outer(n))
}

/// Decade bins for max-gap values: `[0, 1e-12)`, then one bin per decade up
/// to `[1e+1, inf)` - 15 bins total.
pub fn max_gap_histogram(gaps: &[f64]) -> [usize; 15] {
    let mut bins = [0usize; 15];
    for &g in gaps {
        let bin = if g < 1e-12 {
            0
        } else {
            let decade = g.log10().floor() as i64; // -12..=1 mapped to 1..=14
            (decade + 13).clamp(1, 14) as usize
        };
        bins[bin] += 1;
    }
    bins
}
