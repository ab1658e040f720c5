//! Stationarity classification through the inner-variation density.
//!
//! For a stationary map the field `h(det Du)` must be constant, and its
//! constant value `C` pins the admissible determinant values down to the at
//! most two roots of `h(t) = C` (exactly `t = 0` when `C = 0`). The check
//! reports the sampled h-field, the discrete L2 norm of its gradient (zero
//! iff the field is constant on the grid) and the candidate determinants.

use crate::integrand::{fiber_roots_auto, ConvexIntegrand, FiberRoots};

use super::beta::grad_l2_norm;
use super::curl::{det_field, gradient_field};
use super::grid::{Grid2, GridScalar, VectorField2};
use super::PdeError;

#[derive(Debug, Clone)]
pub struct StationarityReport {
    /// `h(det Du)` nodewise.
    pub h_field: GridScalar,
    /// Discrete L2 norm of the gradient of the h-field.
    pub grad_norm: f64,
    /// Roots of `h = mean(h_field)`: the candidate determinant values.
    pub fiber: FiberRoots,
}

pub fn stationarity_check(
    gi: &ConvexIntegrand,
    u: &VectorField2,
) -> Result<StationarityReport, PdeError> {
    let det = det_field(&gradient_field(u));
    let values: Vec<f64> = det.values().iter().map(|&d| gi.h(d)).collect();
    let h_field = Grid2::new(u.nx(), u.ny(), u.h(), u.origin(), values)?;
    let grad_norm = grad_l2_norm(&h_field);
    let fiber = fiber_roots_auto(gi, h_field.mean())?;
    Ok(StationarityReport {
        h_field,
        grad_norm,
        fiber,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Mat2, Vec2};

    #[test]
    fn affine_map_is_stationary_with_matching_fiber() {
        let gi = ConvexIntegrand::from_label("quad").unwrap();
        let a = Mat2::new(1.2, 0.4, 0.3, 1.1);
        let d = a.det();
        let u = VectorField2::sample_unit_square(24, |p| a.mul_vec(p)).unwrap();
        let report = stationarity_check(&gi, &u).unwrap();
        // Zero up to the rounding of per-node affine samples.
        assert!(
            report.grad_norm <= 1e-12,
            "grad_norm = {}",
            report.grad_norm
        );
        for &v in report.h_field.values() {
            assert!((v - gi.h(d)).abs() <= 1e-12);
        }
        assert!(
            report.fiber.roots.iter().any(|r| (r - d).abs() <= 1e-10),
            "fiber {:?} misses det {d}",
            report.fiber.roots
        );
    }

    #[test]
    fn nonconstant_determinant_is_flagged() {
        let gi = ConvexIntegrand::from_label("quad").unwrap();
        let norm = |n: usize| {
            let u =
                VectorField2::sample_unit_square(n, |p| Vec2::new(p.x, (1.0 + p.x * p.x) * p.y))
                    .unwrap();
            stationarity_check(&gi, &u).unwrap().grad_norm
        };
        let (n32, n64) = (norm(32), norm(64));
        assert!(n32 >= 0.01 && n64 >= 0.01, "n32={n32}, n64={n64}");
        assert!(
            (n32 / n64) < 1.5,
            "grad_norm should be stable under refinement"
        );
    }

    #[test]
    fn zero_map_sits_on_the_zero_fiber() {
        let gi = ConvexIntegrand::from_label("cosh").unwrap();
        let u = VectorField2::sample_unit_square(16, |_| Vec2::new(0.0, 0.0)).unwrap();
        let report = stationarity_check(&gi, &u).unwrap();
        assert_eq!(report.grad_norm, 0.0);
        assert_eq!(report.fiber.roots, vec![0.0]);
    }
}
