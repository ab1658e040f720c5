//! Strictly convex integrand bundles and the inner-variation density
//! `h(t) = g'(t) t - g(t)`.
//!
//! A [`ConvexIntegrand`] carries evaluators for `g`, `g'`, `g''` and is
//! normalized so that `g(0) = g'(0) = 0`. Strict convexity (`g'' > 0`) makes
//! `h` strictly monotone on each half-line (`h'(t) = g''(t) t`), so each
//! positive level of `h` has exactly one root per half-line; level zero is
//! attained only at the origin.
//!
//! Validation is sampling-based, not symbolic: [`hp_check`] certifies the
//! hypotheses only at finitely many points of the given interval.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Absolute tolerance on `|h(root) - level|` accepted by the fiber solver.
pub const ROOT_TOL: f64 = 1e-12;
/// Iteration cap for each bisection.
const BISECT_CAP: usize = 200;
/// Normalization slack for `g(0)` and `g'(0)`.
const NORMALIZATION_TOL: f64 = 1e-14;

#[derive(Debug, Error, PartialEq)]
pub enum IntegrandError {
    #[error("unknown integrand label '{0}'")]
    UnknownLabel(String),
    #[error("integrand not normalized: |g(0)| = {g0:e}, |g'(0)| = {g1:e}")]
    NotNormalized { g0: f64, g1: f64 },
    #[error("non-finite evaluation of {what} at t = {t}")]
    NonFinite { what: &'static str, t: f64 },
    #[error("bracket too small: h({t}) = {h} < level {level}")]
    BracketTooSmall { t: f64, h: f64, level: f64 },
    #[error("invalid sampling request: lo must be < hi and samples >= 3")]
    BadSampling,
}

type Scalar = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Bundle `(g, g', g'')` plus a short label. Immutable after construction;
/// evaluation is safe from any thread.
#[derive(Clone)]
pub struct ConvexIntegrand {
    g: Scalar,
    g1: Scalar,
    g2: Scalar,
    label: String,
}

impl fmt::Debug for ConvexIntegrand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConvexIntegrand")
            .field("label", &self.label)
            .finish()
    }
}

impl ConvexIntegrand {
    /// Wraps evaluators, enforcing the normalization `g(0) = g'(0) = 0`.
    pub fn new(
        label: impl Into<String>,
        g: impl Fn(f64) -> f64 + Send + Sync + 'static,
        g1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        g2: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self, IntegrandError> {
        let g0 = g(0.0);
        let g10 = g1(0.0);
        if !(g0.abs() <= NORMALIZATION_TOL && g10.abs() <= NORMALIZATION_TOL) {
            return Err(IntegrandError::NotNormalized {
                g0: g0.abs(),
                g1: g10.abs(),
            });
        }
        Ok(Self {
            g: Arc::new(g),
            g1: Arc::new(g1),
            g2: Arc::new(g2),
            label: label.into(),
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn g(&self, t: f64) -> f64 {
        (self.g)(t)
    }

    pub fn g1(&self, t: f64) -> f64 {
        (self.g1)(t)
    }

    pub fn g2(&self, t: f64) -> f64 {
        (self.g2)(t)
    }

    /// `h(t) = g'(t) t - g(t)`; vanishes at the origin by normalization.
    pub fn h(&self, t: f64) -> f64 {
        self.g1(t) * t - self.g(t)
    }

    /// The built-in bundles: `quad` (t^2), `cosh` (cosh t - 1),
    /// `quartic` (t^2 + t^4/12) and the deliberately degenerate
    /// `quartic-pure` (t^4, fails strict convexity at the origin).
    pub fn from_label(label: &str) -> Result<Self, IntegrandError> {
        match label {
            "quad" => Self::new("quad", |t| t * t, |t| 2.0 * t, |_| 2.0),
            "cosh" => Self::new("cosh", |t| t.cosh() - 1.0, f64::sinh, f64::cosh),
            "quartic" => Self::new(
                "quartic",
                |t| t * t + t.powi(4) / 12.0,
                |t| 2.0 * t + t.powi(3) / 3.0,
                |t| 2.0 + t * t,
            ),
            "quartic-pure" => Self::new(
                "quartic-pure",
                |t| t.powi(4),
                |t| 4.0 * t.powi(3),
                |t| 12.0 * t * t,
            ),
            other => Err(IntegrandError::UnknownLabel(other.to_string())),
        }
    }

    pub fn builtin_labels() -> &'static [&'static str] {
        &["quad", "cosh", "quartic", "quartic-pure"]
    }
}

/// `h_eval(gi, t) = g'(t) t - g(t)`.
pub fn h_eval(gi: &ConvexIntegrand, t: f64) -> f64 {
    gi.h(t)
}

/// Roots of `h = level` found inside a symmetric bracket, sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberRoots {
    pub roots: Vec<f64>,
    pub level: f64,
}

impl FiberRoots {
    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }
}

/// Solves `h(t) = level` on `[-bracket, bracket]`.
///
/// Level zero yields the single root `t = 0`; negative levels have no roots
/// (`h >= 0` under the hypotheses); positive levels are bisected once per
/// half-line using the strict monotonicity of `h` there. Fails with
/// [`IntegrandError::BracketTooSmall`] when `h(+-bracket) < level`.
pub fn h_inverse_fiber(
    gi: &ConvexIntegrand,
    level: f64,
    bracket: f64,
) -> Result<FiberRoots, IntegrandError> {
    assert!(bracket > 0.0, "bracket must be positive");
    if level == 0.0 {
        return Ok(FiberRoots {
            roots: vec![0.0],
            level,
        });
    }
    if level < 0.0 {
        return Ok(FiberRoots {
            roots: Vec::new(),
            level,
        });
    }
    for t in [-bracket, bracket] {
        let ht = gi.h(t);
        if !ht.is_finite() {
            return Err(IntegrandError::NonFinite { what: "h", t });
        }
        if ht < level {
            return Err(IntegrandError::BracketTooSmall { t, h: ht, level });
        }
    }
    let negative = bisect_half_line(gi, level, -bracket);
    let positive = bisect_half_line(gi, level, bracket);
    Ok(FiberRoots {
        roots: vec![negative, positive],
        level,
    })
}

/// Bisection on the half-line between 0 and `end` (either sign). `h - level`
/// changes sign there: `h(0) = 0 < level <= h(end)`.
fn bisect_half_line(gi: &ConvexIntegrand, level: f64, end: f64) -> f64 {
    let mut inner = 0.0_f64; // h < level side
    let mut outer = end; // h >= level side
    let mut mid = 0.5 * (inner + outer);
    for _ in 0..BISECT_CAP {
        mid = 0.5 * (inner + outer);
        let hm = gi.h(mid);
        if (hm - level).abs() <= ROOT_TOL {
            return mid;
        }
        if hm < level {
            inner = mid;
        } else {
            outer = mid;
        }
        if inner == outer {
            break;
        }
    }
    mid
}

/// Solves `h = level` expanding the bracket until it contains the roots.
pub fn fiber_roots_auto(gi: &ConvexIntegrand, level: f64) -> Result<FiberRoots, IntegrandError> {
    let mut bracket = 1.0;
    let mut last = None;
    for _ in 0..60 {
        match h_inverse_fiber(gi, level, bracket) {
            Ok(r) => return Ok(r),
            Err(IntegrandError::BracketTooSmall { .. }) => {
                last = Some(IntegrandError::BracketTooSmall {
                    t: bracket,
                    h: gi.h(bracket),
                    level,
                });
                bracket *= 2.0;
            }
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("loop ran"))
}

/// Uniform convexity margin: the minimum of `g''` over a dense sample of
/// `[-big_l, big_l]`. The returned `alpha` is checked against
/// `g'(t) t >= alpha t^2` at every sample.
pub fn convexity_gap(gi: &ConvexIntegrand, big_l: f64) -> f64 {
    assert!(big_l > 0.0, "L must be positive");
    const SAMPLES: usize = 2001;
    let mut alpha = f64::INFINITY;
    for k in 0..SAMPLES {
        let t = -big_l + 2.0 * big_l * (k as f64) / ((SAMPLES - 1) as f64);
        alpha = alpha.min(gi.g2(t));
    }
    for k in 0..SAMPLES {
        let t = -big_l + 2.0 * big_l * (k as f64) / ((SAMPLES - 1) as f64);
        let lhs = gi.g1(t) * t;
        assert!(
            lhs >= alpha * t * t - 1e-12 * (1.0 + t * t),
            "convexity margin violated at t = {t}: {lhs} < {} * t^2",
            alpha
        );
    }
    alpha
}

/// What went wrong at a sample point during [`hp_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HpFailure {
    /// `g''(t) <= 0`.
    NonPositiveSecondDerivative,
    /// `|g(0)|` above tolerance.
    NormalizationValue,
    /// `|g'(0)|` above tolerance.
    NormalizationSlope,
    /// `g'` inconsistent with a central difference of `g`.
    FirstDerivativeMismatch,
    /// `g''` inconsistent with a second central difference of `g`.
    SecondDerivativeMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HpWitness {
    pub t: f64,
    pub failure: HpFailure,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HpReport {
    pub pass: bool,
    pub witnesses: Vec<HpWitness>,
}

/// Samples the integrand hypotheses on `[lo, hi]`:
/// `g'' > 0` at every sample, `|g(0)|, |g'(0)| <= 1e-14`, and
/// finite-difference consistency of `g'` and `g''` against `g` (within 1e-5)
/// at interior samples. Non-finite evaluations are rejected as errors rather
/// than recorded as witnesses.
pub fn hp_check(
    gi: &ConvexIntegrand,
    lo: f64,
    hi: f64,
    samples: usize,
) -> Result<HpReport, IntegrandError> {
    if lo >= hi || samples < 3 {
        return Err(IntegrandError::BadSampling);
    }
    const FD_TOL: f64 = 1e-5;
    const EPS1: f64 = 1e-5; // first-derivative central difference
    const EPS2: f64 = 1e-4; // second-derivative central difference
    let mut witnesses = Vec::new();

    let g0 = gi.g(0.0);
    if !g0.is_finite() {
        return Err(IntegrandError::NonFinite { what: "g", t: 0.0 });
    }
    if g0.abs() > NORMALIZATION_TOL {
        witnesses.push(HpWitness {
            t: 0.0,
            failure: HpFailure::NormalizationValue,
            value: g0,
        });
    }
    let g10 = gi.g1(0.0);
    if !g10.is_finite() {
        return Err(IntegrandError::NonFinite { what: "g'", t: 0.0 });
    }
    if g10.abs() > NORMALIZATION_TOL {
        witnesses.push(HpWitness {
            t: 0.0,
            failure: HpFailure::NormalizationSlope,
            value: g10,
        });
    }

    for k in 0..samples {
        let t = lo + (hi - lo) * (k as f64) / ((samples - 1) as f64);
        let (g, g1, g2) = (gi.g(t), gi.g1(t), gi.g2(t));
        if !g.is_finite() {
            return Err(IntegrandError::NonFinite { what: "g", t });
        }
        if !g1.is_finite() {
            return Err(IntegrandError::NonFinite { what: "g'", t });
        }
        if !g2.is_finite() {
            return Err(IntegrandError::NonFinite { what: "g''", t });
        }
        if g2 <= 0.0 {
            witnesses.push(HpWitness {
                t,
                failure: HpFailure::NonPositiveSecondDerivative,
                value: g2,
            });
        }
        if k == 0 || k == samples - 1 {
            continue;
        }
        let fd1 = (gi.g(t + EPS1) - gi.g(t - EPS1)) / (2.0 * EPS1);
        if (g1 - fd1).abs() > FD_TOL {
            witnesses.push(HpWitness {
                t,
                failure: HpFailure::FirstDerivativeMismatch,
                value: (g1 - fd1).abs(),
            });
        }
        let fd2 = (gi.g(t + EPS2) - 2.0 * g + gi.g(t - EPS2)) / (EPS2 * EPS2);
        if (g2 - fd2).abs() > FD_TOL {
            witnesses.push(HpWitness {
                t,
                failure: HpFailure::SecondDerivativeMismatch,
                value: (g2 - fd2).abs(),
            });
        }
    }

    Ok(HpReport {
        pass: witnesses.is_empty(),
        witnesses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_labels_resolve() {
        for label in ConvexIntegrand::builtin_labels() {
            let gi = ConvexIntegrand::from_label(label).unwrap();
            assert_eq!(gi.label(), *label);
        }
        assert!(matches!(
            ConvexIntegrand::from_label("nope"),
            Err(IntegrandError::UnknownLabel(_))
        ));
    }

    #[test]
    fn construction_rejects_unnormalized() {
        let err = ConvexIntegrand::new("bad", |t| t * t + 1.0, |t| 2.0 * t, |_| 2.0);
        assert!(matches!(err, Err(IntegrandError::NotNormalized { .. })));
        let err = ConvexIntegrand::new("bad-slope", |t| t, |_| 1.0, |_| 0.0);
        assert!(matches!(err, Err(IntegrandError::NotNormalized { .. })));
    }

    #[test]
    fn hp_check_quadratic_passes() {
        let gi = ConvexIntegrand::from_label("quad").unwrap();
        let report = hp_check(&gi, -5.0, 5.0, 101).unwrap();
        assert!(report.pass, "witnesses: {:?}", report.witnesses);
    }

    #[test]
    fn hp_check_pure_quartic_fails_at_origin() {
        let gi = ConvexIntegrand::from_label("quartic-pure").unwrap();
        let report = hp_check(&gi, -1.0, 1.0, 101).unwrap();
        assert!(!report.pass);
        assert!(report.witnesses.iter().any(|w| {
            w.failure == HpFailure::NonPositiveSecondDerivative && w.t.abs() <= 1e-12
        }));
    }

    #[test]
    fn hp_check_cosh_passes() {
        let gi = ConvexIntegrand::from_label("cosh").unwrap();
        let report = hp_check(&gi, -3.0, 3.0, 101).unwrap();
        assert!(report.pass, "witnesses: {:?}", report.witnesses);
    }

    #[test]
    fn hp_check_rejects_non_finite() {
        let gi = ConvexIntegrand::new(
            "singular",
            |t| if t.abs() > 2.0 { f64::NAN } else { t * t },
            |t| 2.0 * t,
            |_| 2.0,
        )
        .unwrap();
        assert!(matches!(
            hp_check(&gi, -5.0, 5.0, 101),
            Err(IntegrandError::NonFinite { .. })
        ));
    }

    #[test]
    fn hp_check_flags_inconsistent_derivative() {
        let gi = ConvexIntegrand::new("lying", |t| t * t, |t| 2.5 * t, |_| 2.0).unwrap();
        let report = hp_check(&gi, -5.0, 5.0, 101).unwrap();
        assert!(!report.pass);
        assert!(report
            .witnesses
            .iter()
            .any(|w| w.failure == HpFailure::FirstDerivativeMismatch));
    }

    #[test]
    fn h_eval_cases() {
        let quad = ConvexIntegrand::from_label("quad").unwrap();
        // h(t) = 2t*t - t^2 = t^2
        assert_eq!(h_eval(&quad, 1.0), 1.0);
        assert_eq!(h_eval(&quad, -2.0), 4.0);
        for label in ConvexIntegrand::builtin_labels() {
            let gi = ConvexIntegrand::from_label(label).unwrap();
            assert_eq!(h_eval(&gi, 0.0), 0.0);
        }
    }

    #[test]
    fn fiber_roots_quadratic() {
        let quad = ConvexIntegrand::from_label("quad").unwrap();
        let roots = h_inverse_fiber(&quad, 4.0, 10.0).unwrap();
        assert_eq!(roots.roots.len(), 2);
        assert!((roots.roots[0] + 2.0).abs() <= 1e-9);
        assert!((roots.roots[1] - 2.0).abs() <= 1e-9);
        for &r in &roots.roots {
            assert!((quad.h(r) - 4.0).abs() <= ROOT_TOL);
        }
    }

    #[test]
    fn fiber_level_zero_and_negative() {
        let quad = ConvexIntegrand::from_label("quad").unwrap();
        assert_eq!(h_inverse_fiber(&quad, 0.0, 1.0).unwrap().roots, vec![0.0]);
        assert!(h_inverse_fiber(&quad, -1.0, 1.0).unwrap().is_empty());
    }

    #[test]
    fn fiber_bracket_too_small() {
        let quad = ConvexIntegrand::from_label("quad").unwrap();
        assert!(matches!(
            h_inverse_fiber(&quad, 4.0, 1.0),
            Err(IntegrandError::BracketTooSmall { .. })
        ));
    }

    #[test]
    fn fiber_roots_sorted_and_on_level_all_builtins() {
        for label in ["quad", "cosh", "quartic"] {
            let gi = ConvexIntegrand::from_label(label).unwrap();
            for level in [0.25, 1.0, 4.0] {
                let roots = h_inverse_fiber(&gi, level, 20.0).unwrap();
                assert_eq!(roots.roots.len(), 2, "{label} level {level}");
                assert!(roots.roots[0] < 0.0 && roots.roots[1] > 0.0);
                for &r in &roots.roots {
                    assert!((gi.h(r) - level).abs() <= ROOT_TOL);
                }
            }
        }
    }

    #[test]
    fn convexity_gap_values() {
        let quad = ConvexIntegrand::from_label("quad").unwrap();
        assert_eq!(convexity_gap(&quad, 3.0), 2.0);
        let cosh = ConvexIntegrand::from_label("cosh").unwrap();
        assert!((convexity_gap(&cosh, 3.0) - 1.0).abs() <= 1e-12);
        let quartic = ConvexIntegrand::from_label("quartic").unwrap();
        assert!((convexity_gap(&quartic, 2.0) - 2.0).abs() <= 1e-12);
    }

    #[test]
    fn h_monotone_on_half_lines_and_nonnegative() {
        for label in ["quad", "cosh", "quartic"] {
            let gi = ConvexIntegrand::from_label(label).unwrap();
            let mut prev = gi.h(0.01);
            for k in 2..500 {
                let t = 0.01 * k as f64;
                let cur = gi.h(t);
                assert!(cur > prev, "{label}: h not increasing at t = {t}");
                prev = cur;
            }
            let mut prev = gi.h(-0.01);
            for k in 2..500 {
                let t = -0.01 * k as f64;
                let cur = gi.h(t);
                assert!(cur > prev, "{label}: h not increasing at t = {t}");
                prev = cur;
            }
            for k in -400..=400 {
                let t = 0.01 * k as f64;
                let h = gi.h(t);
                if t == 0.0 {
                    assert_eq!(h, 0.0);
                } else {
                    assert!(h > 0.0, "{label}: h({t}) = {h} not positive");
                }
            }
        }
    }

    #[test]
    fn finite_difference_consistency_of_builtins() {
        let eps = 1e-5;
        for label in ["quad", "cosh", "quartic"] {
            let gi = ConvexIntegrand::from_label(label).unwrap();
            for k in -50..=50 {
                let t = 0.1 * k as f64;
                let fd = (gi.g(t + eps) - gi.g(t - eps)) / (2.0 * eps);
                assert!((gi.g1(t) - fd).abs() <= 1e-5, "{label} at {t}");
            }
        }
    }
}
