//! Built-in test maps on the unit square, selectable by name in experiment
//! configs.

use crate::algebra::{Mat2, Vec2};

use super::grid::VectorField2;
use super::PdeError;

/// The named test maps.
///
/// - `affine`: `u = A x` with `det A = 1.2` — constant nonzero determinant.
/// - `shear`: composition of two sinusoidal shears — smooth, genuinely
///   two-dimensional, area preserving (`det Du = 1`).
/// - `nonconst-det`: `u = (x, (1 + x^2) y)` with `det Du = 1 + x^2` — not a
///   critical point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestMap {
    Affine,
    Shear,
    NonconstDet,
}

impl TestMap {
    pub fn from_name(name: &str) -> Option<TestMap> {
        match name {
            "affine" => Some(TestMap::Affine),
            "shear" => Some(TestMap::Shear),
            "nonconst-det" => Some(TestMap::NonconstDet),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TestMap::Affine => "affine",
            TestMap::Shear => "shear",
            TestMap::NonconstDet => "nonconst-det",
        }
    }

    pub fn eval(&self, p: Vec2) -> Vec2 {
        match self {
            TestMap::Affine => AFFINE_MATRIX.mul_vec(p),
            TestMap::Shear => {
                let v1 = p.x + 0.3 * (3.0 * p.y).sin();
                Vec2::new(v1, p.y + 0.3 * (3.0 * v1).sin())
            }
            TestMap::NonconstDet => Vec2::new(p.x, (1.0 + p.x * p.x) * p.y),
        }
    }
}

pub const AFFINE_MATRIX: Mat2 = Mat2 {
    e: [[1.2, 0.4], [0.3, 1.1]],
};

/// Samples a named map on an `n x n` grid over the unit square.
pub fn test_map_field(map: TestMap, grid_n: usize) -> Result<VectorField2, PdeError> {
    VectorField2::sample_unit_square(grid_n, |p| map.eval(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pde::{det_field, gradient_field};

    #[test]
    fn names_round_trip() {
        for map in [TestMap::Affine, TestMap::Shear, TestMap::NonconstDet] {
            assert_eq!(TestMap::from_name(map.name()), Some(map));
        }
        assert_eq!(TestMap::from_name("nope"), None);
    }

    #[test]
    fn shear_composition_is_area_preserving() {
        let u = test_map_field(TestMap::Shear, 64).unwrap();
        let det = det_field(&gradient_field(&u));
        for iy in 1..63 {
            for ix in 1..63 {
                // Interior centered differences of the exact map: det = 1 up
                // to truncation.
                assert!((det.at(ix, iy) - 1.0).abs() <= 1e-2);
            }
        }
    }

    #[test]
    fn nonconst_det_matches_formula() {
        let u = test_map_field(TestMap::NonconstDet, 64).unwrap();
        let det = det_field(&gradient_field(&u));
        for iy in 0..64 {
            for ix in 0..64 {
                let p = det.node_pos(ix, iy);
                assert!((det.at(ix, iy) - (1.0 + p.x * p.x)).abs() <= 1e-10);
            }
        }
    }
}
