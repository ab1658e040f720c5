//! Level-curve tracing.
//!
//! A level set of one component `u_c` is traced by integrating the rotated
//! gradient direction `J Du_c / |Du_c|` — the tangent of the level curve —
//! with an explicit midpoint step of size `h`, followed by one Newton
//! projection back onto the level set. The determinant of `Du` is sampled
//! (bilinearly) along the polyline; its spread is the diagnostic: exactly
//! zero for affine maps, interpolation-error small for smooth
//! area-preserving maps, and order one when the determinant genuinely
//! varies along the curve.

use crate::algebra::Vec2;

use super::curl::{det_field, gradient_field};
use super::grid::{Grid2, VectorField2};
use super::PdeError;

#[derive(Debug, Clone)]
pub struct LevelCurveTrace {
    pub polyline: Vec<Vec2>,
    pub det_samples: Vec<f64>,
    pub det_spread: f64,
}

const GRAD_FLOOR: f64 = 1e-10;

/// Traces `steps` steps of the level curve `{ u_component = level }` from
/// `seed`. `component` is 1 or 2. The seed must satisfy
/// `|u_component(seed) - level| <= h` and carry a nondegenerate gradient.
pub fn trace_level_curve(
    u: &VectorField2,
    component: usize,
    level: f64,
    seed: Vec2,
    steps: usize,
) -> Result<LevelCurveTrace, PdeError> {
    if component != 1 && component != 2 {
        return Err(PdeError::BadComponent(component));
    }
    let du = gradient_field(u);
    let det = det_field(&du);
    let comp = |v: Vec2| if component == 1 { v.x } else { v.y };
    // Gradient of the chosen component, as a vector field.
    let grad_values: Vec<Vec2> = du
        .values()
        .iter()
        .map(|m| Vec2::new(m.e[component - 1][0], m.e[component - 1][1]))
        .collect();
    let grad = Grid2::new(u.nx(), u.ny(), u.h(), u.origin(), grad_values)?;

    let value_at = |p: Vec2| u.interp(p).map(comp);
    let h = u.h();

    let seed_value = value_at(seed).ok_or(PdeError::LeftDomain { step: 0 })?;
    if (seed_value - level).abs() > h {
        return Err(PdeError::SeedOffLevel {
            gap: (seed_value - level).abs(),
            h,
        });
    }

    let tangent = |p: Vec2, step: usize| -> Result<Vec2, PdeError> {
        let g = grad.interp(p).ok_or(PdeError::LeftDomain { step })?;
        let n = g.norm();
        if n < GRAD_FLOOR {
            return Err(PdeError::DegenerateGradientOnCurve { step });
        }
        Ok(g.rot90().scale(1.0 / n))
    };

    let mut polyline = vec![seed];
    let mut det_samples = vec![det.interp(seed).ok_or(PdeError::LeftDomain { step: 0 })?];
    let mut x = seed;
    for step in 1..=steps {
        let v = tangent(x, step)?;
        let mid = x.add(v.scale(0.5 * h));
        let v_mid = tangent(mid, step)?;
        let mut next = x.add(v_mid.scale(h));
        // One Newton correction back to the level set.
        let g = grad.interp(next).ok_or(PdeError::LeftDomain { step })?;
        let gn2 = g.dot(g);
        if gn2 < GRAD_FLOOR * GRAD_FLOOR {
            return Err(PdeError::DegenerateGradientOnCurve { step });
        }
        let val = value_at(next).ok_or(PdeError::LeftDomain { step })?;
        next = next.sub(g.scale((val - level) / gn2));
        let d = det.interp(next).ok_or(PdeError::LeftDomain { step })?;
        polyline.push(next);
        det_samples.push(d);
        x = next;
    }

    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &d in &det_samples {
        lo = lo.min(d);
        hi = hi.max(d);
    }
    Ok(LevelCurveTrace {
        polyline,
        det_samples,
        det_spread: hi - lo,
    })
}
