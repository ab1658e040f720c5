//! Uniform-grid sampled fields on a rectangle.
//!
//! One node layout serves scalar, vector and matrix values: `nx * ny` nodes
//! with square spacing `h`, stored row-major with the y index outermost
//! (`index = iy * nx + ix`). The text file format mirrors the layout:
//!
//! ```text
//! gridfield2 nx ny h ox oy k
//! v1 ... vk        (node (0,0))
//! v1 ... vk        (node (1,0))
//! ...
//! ```
//!
//! with `k` components per node: 1 for scalars, 2 for plane vectors, 4 for
//! 2x2 matrices in row-major order.

use crate::algebra::{Mat2, Vec2};

use super::PdeError;

/// Minimum nodes per side.
pub const MIN_NODES: usize = 8;

/// Per-node value that can round-trip through the `k`-component text format.
pub trait NodeValue: Copy {
    const COMPONENTS: usize;
    fn write_components(&self, out: &mut [f64]);
    fn read_components(raw: &[f64]) -> Self;
    fn is_finite_value(&self) -> bool;
}

impl NodeValue for f64 {
    const COMPONENTS: usize = 1;
    fn write_components(&self, out: &mut [f64]) {
        out[0] = *self;
    }
    fn read_components(raw: &[f64]) -> Self {
        raw[0]
    }
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl NodeValue for Vec2 {
    const COMPONENTS: usize = 2;
    fn write_components(&self, out: &mut [f64]) {
        out[0] = self.x;
        out[1] = self.y;
    }
    fn read_components(raw: &[f64]) -> Self {
        Vec2::new(raw[0], raw[1])
    }
    fn is_finite_value(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl NodeValue for Mat2 {
    const COMPONENTS: usize = 4;
    fn write_components(&self, out: &mut [f64]) {
        out[0] = self.e[0][0];
        out[1] = self.e[0][1];
        out[2] = self.e[1][0];
        out[3] = self.e[1][1];
    }
    fn read_components(raw: &[f64]) -> Self {
        Mat2::new(raw[0], raw[1], raw[2], raw[3])
    }
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

/// Uniform grid of `T` values over `[ox, ox + (nx-1) h] x [oy, oy + (ny-1) h]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid2<T> {
    nx: usize,
    ny: usize,
    h: f64,
    origin: Vec2,
    values: Vec<T>,
}

/// Sampled map into the plane.
pub type VectorField2 = Grid2<Vec2>;
/// Sampled matrix field (gradients, scaled gradients).
pub type MatrixField2 = Grid2<Mat2>;
/// Sampled scalar field.
pub type GridScalar = Grid2<f64>;

impl<T: NodeValue> Grid2<T> {
    pub fn new(
        nx: usize,
        ny: usize,
        h: f64,
        origin: Vec2,
        values: Vec<T>,
    ) -> Result<Self, PdeError> {
        if nx < MIN_NODES || ny < MIN_NODES {
            return Err(PdeError::GridTooSmall { nx, ny });
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(PdeError::BadSpacing(h));
        }
        if values.len() != nx * ny {
            return Err(PdeError::ValueCount {
                expected: nx * ny,
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite_value()) {
            return Err(PdeError::NonFiniteValue);
        }
        Ok(Self {
            nx,
            ny,
            h,
            origin,
            values,
        })
    }

    /// Samples `f` at every node of an `n x n` grid over the unit square.
    pub fn sample_unit_square(n: usize, f: impl Fn(Vec2) -> T) -> Result<Self, PdeError> {
        let h = 1.0 / (n as f64 - 1.0);
        Self::sample(n, n, h, Vec2::new(0.0, 0.0), f)
    }

    pub fn sample(
        nx: usize,
        ny: usize,
        h: f64,
        origin: Vec2,
        f: impl Fn(Vec2) -> T,
    ) -> Result<Self, PdeError> {
        let mut values = Vec::with_capacity(nx * ny);
        for iy in 0..ny {
            for ix in 0..nx {
                values.push(f(Vec2::new(
                    origin.x + ix as f64 * h,
                    origin.y + iy as f64 * h,
                )));
            }
        }
        Self::new(nx, ny, h, origin, values)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn origin(&self) -> Vec2 {
        self.origin
    }

    pub fn node_pos(&self, ix: usize, iy: usize) -> Vec2 {
        Vec2::new(
            self.origin.x + ix as f64 * self.h,
            self.origin.y + iy as f64 * self.h,
        )
    }

    pub fn at(&self, ix: usize, iy: usize) -> T {
        self.values[iy * self.nx + ix]
    }

    pub fn set(&mut self, ix: usize, iy: usize, v: T) {
        self.values[iy * self.nx + ix] = v;
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Extent of the sampled rectangle, `((nx-1) h, (ny-1) h)`.
    pub fn extent(&self) -> (f64, f64) {
        ((self.nx - 1) as f64 * self.h, (self.ny - 1) as f64 * self.h)
    }

    pub fn contains(&self, p: Vec2) -> bool {
        let (lx, ly) = self.extent();
        p.x >= self.origin.x
            && p.x <= self.origin.x + lx
            && p.y >= self.origin.y
            && p.y <= self.origin.y + ly
    }

    /// Cell index and in-cell fractions for bilinear interpolation.
    fn locate(&self, p: Vec2) -> Option<(usize, usize, f64, f64)> {
        if !self.contains(p) {
            return None;
        }
        let fx = (p.x - self.origin.x) / self.h;
        let fy = (p.y - self.origin.y) / self.h;
        let ix = (fx.floor() as usize).min(self.nx - 2);
        let iy = (fy.floor() as usize).min(self.ny - 2);
        Some((ix, iy, fx - ix as f64, fy - iy as f64))
    }

    /// Serializes in the `gridfield2` text format.
    pub fn write_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "gridfield2 {} {} {} {} {} {}\n",
            self.nx,
            self.ny,
            fmt_g(self.h),
            fmt_g(self.origin.x),
            fmt_g(self.origin.y),
            T::COMPONENTS
        ));
        let mut comp = [0.0; 4];
        for v in &self.values {
            v.write_components(&mut comp[..T::COMPONENTS]);
            let line: Vec<String> = comp[..T::COMPONENTS].iter().map(|c| fmt_g(*c)).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    /// Parses the `gridfield2` text format. Errors carry the byte offset of
    /// the offending token.
    pub fn read_text(text: &str) -> Result<Self, PdeError> {
        let mut tok = Tokens::new(text);
        let magic = tok.next_str("header")?;
        if magic.text != "gridfield2" {
            return Err(PdeError::FileFormat {
                offset: magic.offset,
                message: format!("expected 'gridfield2' magic, found '{}'", magic.text),
            });
        }
        let nx = tok.next_usize("nx")?;
        let ny = tok.next_usize("ny")?;
        let h = tok.next_f64("h")?;
        let ox = tok.next_f64("ox")?;
        let oy = tok.next_f64("oy")?;
        let k = tok.next_usize("k")?;
        if k != T::COMPONENTS {
            return Err(PdeError::FileFormat {
                offset: tok.last_offset,
                message: format!(
                    "component count {} does not match requested field kind ({} per node)",
                    k,
                    T::COMPONENTS
                ),
            });
        }
        let mut values = Vec::with_capacity(nx * ny);
        let mut comp = [0.0; 4];
        for node in 0..nx * ny {
            for c in comp.iter_mut().take(k) {
                *c = tok
                    .next_f64(&format!("node {node}"))
                    .map_err(|e| e.prefix("value table: "))?;
            }
            values.push(T::read_components(&comp[..k]));
        }
        Grid2::new(nx, ny, h, Vec2::new(ox, oy), values)
    }
}

impl GridScalar {
    pub fn mean(&self) -> f64 {
        let mut acc = crate::KahanSum::new();
        for &v in &self.values {
            acc.add(v);
        }
        acc.value() / self.values.len() as f64
    }

    pub fn interp(&self, p: Vec2) -> Option<f64> {
        let (ix, iy, tx, ty) = self.locate(p)?;
        let v00 = self.at(ix, iy);
        let v10 = self.at(ix + 1, iy);
        let v01 = self.at(ix, iy + 1);
        let v11 = self.at(ix + 1, iy + 1);
        Some(
            v00 * (1.0 - tx) * (1.0 - ty)
                + v10 * tx * (1.0 - ty)
                + v01 * (1.0 - tx) * ty
                + v11 * tx * ty,
        )
    }
}

impl VectorField2 {
    pub fn interp(&self, p: Vec2) -> Option<Vec2> {
        let (ix, iy, tx, ty) = self.locate(p)?;
        let v00 = self.at(ix, iy);
        let v10 = self.at(ix + 1, iy);
        let v01 = self.at(ix, iy + 1);
        let v11 = self.at(ix + 1, iy + 1);
        Some(
            v00.scale((1.0 - tx) * (1.0 - ty))
                .add(v10.scale(tx * (1.0 - ty)))
                .add(v01.scale((1.0 - tx) * ty))
                .add(v11.scale(tx * ty)),
        )
    }
}

impl MatrixField2 {
    pub fn interp(&self, p: Vec2) -> Option<Mat2> {
        let (ix, iy, tx, ty) = self.locate(p)?;
        let v00 = self.at(ix, iy).scale((1.0 - tx) * (1.0 - ty));
        let v10 = self.at(ix + 1, iy).scale(tx * (1.0 - ty));
        let v01 = self.at(ix, iy + 1).scale((1.0 - tx) * ty);
        let v11 = self.at(ix + 1, iy + 1).scale(tx * ty);
        Some(v00.add(&v10).add(&v01).add(&v11))
    }
}

/// 17-significant-digit float formatting used across all text output.
pub fn fmt_g(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.16e}")
    }
}

struct Token<'a> {
    text: &'a str,
    offset: usize,
}

struct Tokens<'a> {
    text: &'a str,
    pos: usize,
    last_offset: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            text,
            pos: 0,
            last_offset: 0,
        }
    }

    fn next_str(&mut self, what: &str) -> Result<Token<'a>, PdeError> {
        let bytes = self.text.as_bytes();
        let mut start = self.pos;
        while start < bytes.len() && bytes[start].is_ascii_whitespace() {
            start += 1;
        }
        if start >= bytes.len() {
            return Err(PdeError::FileFormat {
                offset: start,
                message: format!("unexpected end of file while reading {what}"),
            });
        }
        let mut end = start;
        while end < bytes.len() && !bytes[end].is_ascii_whitespace() {
            end += 1;
        }
        self.pos = end;
        self.last_offset = start;
        Ok(Token {
            text: &self.text[start..end],
            offset: start,
        })
    }

    fn next_usize(&mut self, what: &str) -> Result<usize, PdeError> {
        let t = self.next_str(what)?;
        t.text.parse().map_err(|_| PdeError::FileFormat {
            offset: t.offset,
            message: format!("{what}: expected integer, found '{}'", t.text),
        })
    }

    fn next_f64(&mut self, what: &str) -> Result<f64, PdeError> {
        let t = self.next_str(what)?;
        t.text.parse().map_err(|_| PdeError::FileFormat {
            offset: t.offset,
            message: format!("{what}: expected float, found '{}'", t.text),
        })
    }
}

impl PdeError {
    fn prefix(self, pre: &str) -> PdeError {
        match self {
            PdeError::FileFormat { offset, message } => PdeError::FileFormat {
                offset,
                message: format!("{pre}{message}"),
            },
            other => other,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_vector_field() {
        let f = VectorField2::sample_unit_square(9, |p| Vec2::new(p.x * p.y, p.x - p.y)).unwrap();
        let text = f.write_text();
        let g = VectorField2::read_text(&text).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn round_trip_scalar_and_matrix() {
        let s = GridScalar::sample_unit_square(8, |p| p.x + 2.0 * p.y).unwrap();
        assert_eq!(GridScalar::read_text(&s.write_text()).unwrap(), s);
        let m = MatrixField2::sample_unit_square(8, |p| Mat2::new(p.x, p.y, -p.y, p.x)).unwrap();
        assert_eq!(MatrixField2::read_text(&m.write_text()).unwrap(), m);
    }

    #[test]
    fn rejects_small_grids_and_bad_values() {
        assert!(matches!(
            GridScalar::sample_unit_square(4, |_| 0.0),
            Err(PdeError::GridTooSmall { .. })
        ));
        assert!(matches!(
            GridScalar::sample_unit_square(8, |p| if p.x > 0.5 { f64::NAN } else { 1.0 }),
            Err(PdeError::NonFiniteValue)
        ));
    }

    #[test]
    fn parse_error_reports_byte_offset() {
        let text = "gridfield2 8 8 0.1 0 0 1\n1.0\nbadtoken\n";
        let err = GridScalar::read_text(text).unwrap_err();
        match err {
            PdeError::FileFormat { offset, .. } => {
                assert_eq!(&text[offset..offset + 8], "badtoken");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn parse_error_on_wrong_component_count() {
        let s = GridScalar::sample_unit_square(8, |p| p.x).unwrap();
        let err = VectorField2::read_text(&s.write_text()).unwrap_err();
        assert!(matches!(err, PdeError::FileFormat { .. }));
    }

    #[test]
    fn bilinear_interpolation_reproduces_linear_fields() {
        let s = GridScalar::sample_unit_square(16, |p| 2.0 * p.x - 3.0 * p.y + 0.5).unwrap();
        for &(x, y) in &[(0.13, 0.77), (0.5, 0.5), (0.999, 0.001)] {
            let v = s.interp(Vec2::new(x, y)).unwrap();
            assert!((v - (2.0 * x - 3.0 * y + 0.5)).abs() <= 1e-12);
        }
        assert!(s.interp(Vec2::new(1.5, 0.5)).is_none());
    }
}
