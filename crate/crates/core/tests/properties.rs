//! Property tests for the invariants that hold on open sets of inputs
//! rather than at hand-picked points.

use proptest::prelude::*;

use detlab::algebra::{minor_det, rank_one_gap, Mat2, MinorIndex, Stacked62, Vec2, J};
use detlab::inclusion::{fiber_residual, lift};
use detlab::integrand::ConvexIntegrand;
use detlab::pde::{GridScalar, VectorField2};
use detlab::young::{barycenter, minor_moment, polyconvexity_gap, AtomicMeasure};

fn mat2_strategy(scale: f64) -> impl Strategy<Value = Mat2> {
    let e = move || -scale..scale;
    (e(), e(), e(), e()).prop_map(|(a, b, c, d)| Mat2::new(a, b, c, d))
}

fn stacked_strategy(scale: f64) -> impl Strategy<Value = Stacked62> {
    (
        mat2_strategy(scale),
        mat2_strategy(scale),
        mat2_strategy(scale),
    )
        .prop_map(|(t, m, b)| Stacked62::new(t, m, b))
}

proptest! {
    #[test]
    fn adjugate_identity(m in mat2_strategy(10.0)) {
        let prod = m.mul(&m.cof());
        let want = Mat2::diag(m.det(), m.det());
        prop_assert!(prod.sub(&want).frobenius() <= 1e-10);
    }

    #[test]
    fn rotation_identity(m in mat2_strategy(10.0)) {
        prop_assert!(m.cof_t().mul(&J).sub(&J.mul(&m)).frobenius() <= 1e-12);
    }

    #[test]
    fn det_multiplicative(a in mat2_strategy(10.0), b in mat2_strategy(10.0)) {
        prop_assert!((a.mul(&b).det() - a.det() * b.det()).abs() <= 1e-9);
    }

    #[test]
    fn rank_one_factors_reconstruct(
        a in mat2_strategy(5.0),
        gx in -3.0..3.0f64,
        gy in -3.0..3.0f64,
        theta in 0.0..std::f64::consts::TAU,
    ) {
        let gap = Vec2::new(gx, gy);
        let dir = Vec2::new(theta.cos(), theta.sin());
        let b = a.add(&gap.outer(dir));
        let g = rank_one_gap(&a, &b);
        if g.rank == 1 {
            let (ga, di) = g.factors.unwrap();
            prop_assert!(b.sub(&a).sub(&ga.outer(di)).frobenius() <= 1e-10);
            prop_assert!((di.norm() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn minor_antisymmetry(s in stacked_strategy(5.0), i in 1usize..=6, j in 1usize..=6) {
        prop_assume!(i < j);
        let idx = MinorIndex::new(i, j).unwrap();
        let fwd = minor_det(&s, idx);
        let swapped = Mat2::from_rows(s.row(j), s.row(i)).det();
        prop_assert!((fwd + swapped).abs() <= 1e-12 * (1.0 + fwd.abs()));
    }

    #[test]
    fn h_nonnegative_and_even_part_monotone(t in -6.0..6.0f64) {
        for label in ["quad", "cosh", "quartic"] {
            let gi = ConvexIntegrand::from_label(label).unwrap();
            let h = gi.h(t);
            prop_assert!(h >= 0.0, "{label}: h({t}) = {h}");
            if t != 0.0 {
                // strictly increasing in |t| on each half line
                let closer = gi.h(t * 0.5);
                prop_assert!(h > closer, "{label}: h not monotone at {t}");
            }
        }
    }

    #[test]
    fn lifts_sit_on_the_fiber(m in mat2_strategy(3.0)) {
        for label in ["quad", "cosh", "quartic"] {
            let gi = ConvexIntegrand::from_label(label).unwrap();
            let lifted = lift(&gi, &m);
            prop_assert!(fiber_residual(&gi, &lifted.value).total <= 1e-12);
            prop_assert_eq!(lifted.value.top, m);
        }
    }

    #[test]
    fn barycenter_dominated_by_atoms(
        s1 in stacked_strategy(4.0),
        s2 in stacked_strategy(4.0),
        w in 0.0..1.0f64,
    ) {
        prop_assume!(s1.sub(&s2).frobenius() > 1e-12);
        let mu = AtomicMeasure::new(vec![s1, s2], vec![w, 1.0 - w]).unwrap();
        let max_norm = s1.frobenius().max(s2.frobenius());
        prop_assert!(barycenter(&mu).frobenius() <= max_norm + 1e-12);
    }

    #[test]
    fn pairwise_form_is_twice_moment_gap(
        s1 in stacked_strategy(3.0),
        s2 in stacked_strategy(3.0),
        s3 in stacked_strategy(3.0),
        w1 in 0.05..0.9f64,
        w2 in 0.05..0.9f64,
    ) {
        prop_assume!(w1 + w2 < 0.95);
        prop_assume!(s1.sub(&s2).frobenius() > 1e-9);
        prop_assume!(s1.sub(&s3).frobenius() > 1e-9);
        prop_assume!(s2.sub(&s3).frobenius() > 1e-9);
        let mu = AtomicMeasure::new(
            vec![s1, s2, s3],
            vec![w1, w2, 1.0 - w1 - w2],
        ).unwrap();
        let report = polyconvexity_gap(&mu);
        for (gap, pairwise) in report.minor_gaps.iter().zip(&report.pairwise_gaps) {
            prop_assert!((pairwise - 2.0 * gap).abs() <= 1e-10);
        }
        // Moments themselves are linear in the weights.
        for idx in MinorIndex::all() {
            let direct = w1 * minor_det(&s1, idx)
                + w2 * minor_det(&s2, idx)
                + (1.0 - w1 - w2) * minor_det(&s3, idx);
            prop_assert!((minor_moment(&mu, idx) - direct).abs() <= 1e-12);
        }
    }

    #[test]
    fn grid_text_round_trip(
        n in 8usize..24,
        h in 0.01..1.0f64,
        ox in -2.0..2.0f64,
        oy in -2.0..2.0f64,
        seed in 0u64..1000,
    ) {
        let f = VectorField2::sample(n, n, h, Vec2::new(ox, oy), |p| {
            Vec2::new(
                (p.x * 13.7 + seed as f64).sin(),
                (p.y * 7.3 - p.x).cos(),
            )
        }).unwrap();
        let back = VectorField2::read_text(&f.write_text()).unwrap();
        prop_assert_eq!(f, back);
    }

    #[test]
    fn scalar_grid_round_trip(n in 8usize..20, scale in 0.1..100.0f64) {
        let f = GridScalar::sample_unit_square(n, |p| scale * (p.x - p.y)).unwrap();
        let back = GridScalar::read_text(&f.write_text()).unwrap();
        prop_assert_eq!(f, back);
    }
}
