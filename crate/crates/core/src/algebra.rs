//! Exact small-matrix algebra.
//!
//! Everything here is plain double-precision arithmetic on tiny fixed-size
//! matrices: 2x2 blocks, square matrices up to 4x4, and 6x2 stacks of three
//! 2x2 blocks. The cofactor convention is
//! `cof(X)_{ij} = (-1)^{i+j} det(M_{ji}(X))`, so `X cof(X) = det(X) Id` and,
//! in the 2x2 case, `cof^T(X) J = J X` with `J` the quarter-turn rotation.

// Index loops over n x n blocks of fixed 4x4 backing arrays read clearer
// than iterator chains here.
#![allow(clippy::needless_range_loop)]

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AlgebraError {
    #[error("matrix dimension {0} outside supported range 2..=4")]
    UnsupportedDimension(usize),
    #[error("minor index ({0},{1}) invalid: need 1 <= i < j <= 6")]
    InvalidMinorIndex(usize, usize),
    #[error("non-finite entry in matrix")]
    NonFinite,
}

/// Plane vector, the row/column carrier for 2x2 algebra.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(self, other: Vec2) -> Vec2 {
        Vec2::new(self.x + other.x, self.y + other.y)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(self, other: Vec2) -> Vec2 {
        Vec2::new(self.x - other.x, self.y - other.y)
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Counter-clockwise quarter turn, `J v`.
    pub fn rot90(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn scale(self, s: f64) -> Vec2 {
        Vec2::new(s * self.x, s * self.y)
    }

    /// Outer product `self (x) other` as a 2x2 matrix.
    pub fn outer(self, other: Vec2) -> Mat2 {
        Mat2::new(
            self.x * other.x,
            self.x * other.y,
            self.y * other.x,
            self.y * other.y,
        )
    }
}

/// Dense 2x2 real matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Mat2 {
    pub e: [[f64; 2]; 2],
}

/// The quarter-turn rotation: for any 2x2 `X`, `cof^T(X) J = J X`, and for
/// rows `A_1, A_2` of `A` one has `(A_2, J A_1) = det(A)`.
pub const J: Mat2 = Mat2 {
    e: [[0.0, -1.0], [1.0, 0.0]],
};

impl Mat2 {
    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self {
            e: [[a, b], [c, d]],
        }
    }

    pub const fn identity() -> Self {
        Self::new(1.0, 0.0, 0.0, 1.0)
    }

    pub const fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0, 0.0)
    }

    pub fn diag(a: f64, d: f64) -> Self {
        Self::new(a, 0.0, 0.0, d)
    }

    pub fn from_rows(r1: Vec2, r2: Vec2) -> Self {
        Self::new(r1.x, r1.y, r2.x, r2.y)
    }

    pub fn row(&self, i: usize) -> Vec2 {
        Vec2::new(self.e[i][0], self.e[i][1])
    }

    pub fn det(&self) -> f64 {
        self.e[0][0] * self.e[1][1] - self.e[0][1] * self.e[1][0]
    }

    /// Cofactor matrix in the `X cof(X) = det(X) Id` convention
    /// (the classical adjugate for 2x2).
    pub fn cof(&self) -> Mat2 {
        Mat2::new(self.e[1][1], -self.e[0][1], -self.e[1][0], self.e[0][0])
    }

    /// Transpose of [`Mat2::cof`]; satisfies `cof_t(X) J = J X`.
    pub fn cof_t(&self) -> Mat2 {
        Mat2::new(self.e[1][1], -self.e[1][0], -self.e[0][1], self.e[0][0])
    }

    pub fn transpose(&self) -> Mat2 {
        Mat2::new(self.e[0][0], self.e[1][0], self.e[0][1], self.e[1][1])
    }

    pub fn mul(&self, other: &Mat2) -> Mat2 {
        let mut out = Mat2::zero();
        for i in 0..2 {
            for j in 0..2 {
                out.e[i][j] = self.e[i][0] * other.e[0][j] + self.e[i][1] * other.e[1][j];
            }
        }
        out
    }

    pub fn mul_vec(&self, v: Vec2) -> Vec2 {
        Vec2::new(
            self.e[0][0] * v.x + self.e[0][1] * v.y,
            self.e[1][0] * v.x + self.e[1][1] * v.y,
        )
    }

    pub fn scale(&self, s: f64) -> Mat2 {
        Mat2::new(
            s * self.e[0][0],
            s * self.e[0][1],
            s * self.e[1][0],
            s * self.e[1][1],
        )
    }

    pub fn add(&self, other: &Mat2) -> Mat2 {
        Mat2::new(
            self.e[0][0] + other.e[0][0],
            self.e[0][1] + other.e[0][1],
            self.e[1][0] + other.e[1][0],
            self.e[1][1] + other.e[1][1],
        )
    }

    pub fn sub(&self, other: &Mat2) -> Mat2 {
        Mat2::new(
            self.e[0][0] - other.e[0][0],
            self.e[0][1] - other.e[0][1],
            self.e[1][0] - other.e[1][0],
            self.e[1][1] - other.e[1][1],
        )
    }

    pub fn frobenius(&self) -> f64 {
        let mut s = 0.0;
        for r in &self.e {
            for &v in r {
                s += v * v;
            }
        }
        s.sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.e.iter().all(|r| r.iter().all(|v| v.is_finite()))
    }

    /// Singular values, largest first. Closed form via the Gram matrix;
    /// the product of the two equals `|det|` exactly in infinite precision,
    /// which we exploit for the small one.
    pub fn singular_values(&self) -> (f64, f64) {
        let m = self;
        let e2: f64 = m.e.iter().flatten().map(|v| v * v).sum();
        let d = m.det();
        let gap = (e2 * e2 - 4.0 * d * d).max(0.0).sqrt();
        let s_max = ((e2 + gap) / 2.0).sqrt();
        let s_min = if s_max > 0.0 { d.abs() / s_max } else { 0.0 };
        (s_max, s_min)
    }
}

/// Dense n x n real matrix for n in 2..=4. Entries beyond `n` are unused.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatN {
    pub n: usize,
    pub e: [[f64; 4]; 4],
}

impl MatN {
    pub fn new(n: usize, entries: &[f64]) -> Result<Self, AlgebraError> {
        if !(2..=4).contains(&n) {
            return Err(AlgebraError::UnsupportedDimension(n));
        }
        assert_eq!(entries.len(), n * n, "entry count must be n*n");
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(AlgebraError::NonFinite);
        }
        let mut e = [[0.0; 4]; 4];
        for i in 0..n {
            for j in 0..n {
                e[i][j] = entries[i * n + j];
            }
        }
        Ok(Self { n, e })
    }

    pub fn identity(n: usize) -> Result<Self, AlgebraError> {
        if !(2..=4).contains(&n) {
            return Err(AlgebraError::UnsupportedDimension(n));
        }
        let mut e = [[0.0; 4]; 4];
        for (i, row) in e.iter_mut().enumerate().take(n) {
            row[i] = 1.0;
        }
        Ok(Self { n, e })
    }

    pub fn from_mat2(m: &Mat2) -> Self {
        let mut e = [[0.0; 4]; 4];
        for i in 0..2 {
            for j in 0..2 {
                e[i][j] = m.e[i][j];
            }
        }
        Self { n: 2, e }
    }

    /// Exact cofactor-expansion determinant.
    pub fn det(&self) -> f64 {
        det_rec(&self.e, self.n)
    }

    /// Transpose of the cofactor matrix:
    /// `cof_t(M)_{ij} = (-1)^{i+j} det(delete row i, delete col j)`.
    /// Its transpose satisfies `M cof(M) = det(M) Id`.
    pub fn cof_t(&self) -> MatN {
        let mut out = [[0.0; 4]; 4];
        for i in 0..self.n {
            for j in 0..self.n {
                let sub = delete_row_col(&self.e, self.n, i, j);
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                out[i][j] = sign * det_rec(&sub, self.n - 1);
            }
        }
        MatN { n: self.n, e: out }
    }

    /// Cofactor matrix in the `M cof(M) = det(M) Id` convention.
    pub fn cof(&self) -> MatN {
        self.cof_t().transpose()
    }

    pub fn transpose(&self) -> MatN {
        let mut out = [[0.0; 4]; 4];
        for i in 0..self.n {
            for j in 0..self.n {
                out[i][j] = self.e[j][i];
            }
        }
        MatN { n: self.n, e: out }
    }

    pub fn mul(&self, other: &MatN) -> MatN {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let mut out = [[0.0; 4]; 4];
        for i in 0..self.n {
            for j in 0..self.n {
                let mut s = 0.0;
                for k in 0..self.n {
                    s += self.e[i][k] * other.e[k][j];
                }
                out[i][j] = s;
            }
        }
        MatN { n: self.n, e: out }
    }

    pub fn max_abs_diff(&self, other: &MatN) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                m = m.max((self.e[i][j] - other.e[i][j]).abs());
            }
        }
        m
    }
}

fn det_rec(e: &[[f64; 4]; 4], n: usize) -> f64 {
    match n {
        1 => e[0][0],
        2 => e[0][0] * e[1][1] - e[0][1] * e[1][0],
        _ => {
            let mut acc = 0.0;
            for j in 0..n {
                let sub = delete_row_col(e, n, 0, j);
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                acc += sign * e[0][j] * det_rec(&sub, n - 1);
            }
            acc
        }
    }
}

fn delete_row_col(e: &[[f64; 4]; 4], n: usize, row: usize, col: usize) -> [[f64; 4]; 4] {
    let mut out = [[0.0; 4]; 4];
    let mut oi = 0;
    for i in 0..n {
        if i == row {
            continue;
        }
        let mut oj = 0;
        for j in 0..n {
            if j == col {
                continue;
            }
            out[oi][oj] = e[i][j];
            oj += 1;
        }
        oi += 1;
    }
    out
}

/// 6x2 matrix viewed as three stacked 2x2 blocks. The block decomposition is
/// lossless: rows 1-2 are `top`, rows 3-4 `mid`, rows 5-6 `bot`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Stacked62 {
    pub top: Mat2,
    pub mid: Mat2,
    pub bot: Mat2,
}

impl Stacked62 {
    pub fn new(top: Mat2, mid: Mat2, bot: Mat2) -> Self {
        Self { top, mid, bot }
    }

    /// Row `r` of the 6x2 matrix, 1-based.
    pub fn row(&self, r: usize) -> Vec2 {
        assert!((1..=6).contains(&r), "row index out of range");
        let block = match (r - 1) / 2 {
            0 => &self.top,
            1 => &self.mid,
            _ => &self.bot,
        };
        block.row((r - 1) % 2)
    }

    pub fn from_rows(rows: [Vec2; 6]) -> Self {
        Self {
            top: Mat2::from_rows(rows[0], rows[1]),
            mid: Mat2::from_rows(rows[2], rows[3]),
            bot: Mat2::from_rows(rows[4], rows[5]),
        }
    }

    pub fn rows(&self) -> [Vec2; 6] {
        [
            self.row(1),
            self.row(2),
            self.row(3),
            self.row(4),
            self.row(5),
            self.row(6),
        ]
    }

    pub fn sub(&self, other: &Stacked62) -> Stacked62 {
        Stacked62 {
            top: self.top.sub(&other.top),
            mid: self.mid.sub(&other.mid),
            bot: self.bot.sub(&other.bot),
        }
    }

    pub fn add(&self, other: &Stacked62) -> Stacked62 {
        Stacked62 {
            top: self.top.add(&other.top),
            mid: self.mid.add(&other.mid),
            bot: self.bot.add(&other.bot),
        }
    }

    pub fn scale(&self, s: f64) -> Stacked62 {
        Stacked62 {
            top: self.top.scale(s),
            mid: self.mid.scale(s),
            bot: self.bot.scale(s),
        }
    }

    pub fn frobenius(&self) -> f64 {
        (self.top.frobenius().powi(2) + self.mid.frobenius().powi(2) + self.bot.frobenius().powi(2))
            .sqrt()
    }
}

/// 4x2 matrix as two stacked 2x2 blocks, the ambient space of the
/// first-order inclusion set.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Stacked42 {
    pub top: Mat2,
    pub bot: Mat2,
}

/// Ordered row pair `1 <= i < j <= 6` naming one of the fifteen 2x2 minors
/// of a 6x2 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MinorIndex {
    i: usize,
    j: usize,
}

impl MinorIndex {
    pub fn new(i: usize, j: usize) -> Result<Self, AlgebraError> {
        if i >= 1 && i < j && j <= 6 {
            Ok(Self { i, j })
        } else {
            Err(AlgebraError::InvalidMinorIndex(i, j))
        }
    }

    pub fn i(&self) -> usize {
        self.i
    }

    pub fn j(&self) -> usize {
        self.j
    }

    /// The fifteen index pairs in lexicographic order.
    pub fn all() -> Vec<MinorIndex> {
        let mut out = Vec::with_capacity(15);
        for i in 1..=6 {
            for j in (i + 1)..=6 {
                out.push(MinorIndex { i, j });
            }
        }
        out
    }
}

/// Determinant of the 2x2 matrix formed by rows `i` and `j` of `a`.
pub fn minor_det(a: &Stacked62, idx: MinorIndex) -> f64 {
    Mat2::from_rows(a.row(idx.i), a.row(idx.j)).det()
}

/// Result of [`rank_one_gap`]: the numerical rank of `b - a` and, when that
/// rank is one, vectors with `b - a = gap (x) dir`, `|dir| = 1`.
#[derive(Debug, Clone, Copy)]
pub struct RankOneGap {
    pub rank: usize,
    pub factors: Option<(Vec2, Vec2)>,
}

/// Rank of `b - a` by singular values with a scale-aware threshold
/// (`sigma >= 1e-9 (sigma_max + 1)` counts as nonzero). In the rank-one case
/// the returned pair `(gap, dir)` satisfies `b - a = gap (x) dir`.
pub fn rank_one_gap(a: &Mat2, b: &Mat2) -> RankOneGap {
    let m = b.sub(a);
    let (s_max, s_min) = m.singular_values();
    let thresh = 1e-9 * (s_max + 1.0);
    let rank = (s_max >= thresh) as usize + (s_min >= thresh) as usize;
    if rank != 1 {
        return RankOneGap {
            rank,
            factors: None,
        };
    }
    // Leading right singular vector from the Gram matrix M^T M.
    let g = m.transpose().mul(&m);
    let (p, q, r) = (g.e[0][0], g.e[0][1], g.e[1][1]);
    let dir = if q.abs() > 1e-300 {
        let lam = 0.5 * ((p + r) + ((p - r) * (p - r) + 4.0 * q * q).sqrt());
        let v = Vec2::new(q, lam - p);
        v.scale(1.0 / v.norm())
    } else if p >= r {
        Vec2::new(1.0, 0.0)
    } else {
        Vec2::new(0.0, 1.0)
    };
    let gap = m.mul_vec(dir);
    RankOneGap {
        rank,
        factors: Some((gap, dir)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rand_mat2(rng: &mut impl Rng, scale: f64) -> Mat2 {
        Mat2::new(
            rng.gen_range(-scale..scale),
            rng.gen_range(-scale..scale),
            rng.gen_range(-scale..scale),
            rng.gen_range(-scale..scale),
        )
    }

    #[test]
    fn det_identity_and_hand_cases() {
        assert_eq!(MatN::identity(2).unwrap().det(), 1.0);
        let m = MatN::new(2, &[1.0, 1.0, 0.0, 1.0]).unwrap();
        assert_eq!(m.det(), 1.0);
        let j = MatN::new(2, &[0.0, -1.0, 1.0, 0.0]).unwrap();
        assert_eq!(j.det(), 1.0);
        assert_eq!(J.det(), 1.0);
    }

    #[test]
    fn det_matches_closed_form_3x3_4x4() {
        // det by row reduction done by hand.
        let m3 = MatN::new(3, &[2.0, 0.0, 1.0, 1.0, 3.0, 0.0, 0.0, 1.0, 4.0]).unwrap();
        // 2*(12-0) - 0 + 1*(1-0) = 25
        assert!((m3.det() - 25.0).abs() < 1e-12);
        let m4 = MatN::new(
            4,
            &[
                1.0, 0.0, 0.0, 2.0, //
                0.0, 3.0, 0.0, 0.0, //
                0.0, 0.0, 4.0, 0.0, //
                5.0, 0.0, 0.0, 1.0,
            ],
        )
        .unwrap();
        // block: det [[1,2],[5,1]] * 12 = (1-10)*12 = -108
        assert!((m4.det() + 108.0).abs() < 1e-12);
    }

    #[test]
    fn cof_t_identity_is_identity() {
        for n in 2..=4 {
            let id = MatN::identity(n).unwrap();
            assert_eq!(id.cof_t().max_abs_diff(&id), 0.0);
        }
    }

    #[test]
    fn cof_satisfies_adjugate_identity_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let m = rand_mat2(&mut rng, 10.0);
            let mn = MatN::from_mat2(&m);
            let prod = mn.mul(&mn.cof());
            let mut want = MatN::identity(2).unwrap();
            for i in 0..2 {
                want.e[i][i] = m.det();
            }
            assert!(prod.max_abs_diff(&want) <= 1e-10);
            // Mat2 fast path agrees with the generic path.
            assert!(MatN::from_mat2(&m.cof_t()).max_abs_diff(&mn.cof_t()) <= 1e-13);
        }
    }

    #[test]
    fn cof_adjugate_identity_3x3_4x4() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 3..=4 {
            for _ in 0..200 {
                let entries: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-5.0..5.0)).collect();
                let m = MatN::new(n, &entries).unwrap();
                let prod = m.mul(&m.cof());
                let mut want = MatN::identity(n).unwrap();
                for i in 0..n {
                    want.e[i][i] = m.det();
                }
                assert!(prod.max_abs_diff(&want) <= 1e-9);
            }
        }
    }

    #[test]
    fn cof_t_rotation_identity() {
        // cof^T(X) J = J X, exact in rational arithmetic.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let x = rand_mat2(&mut rng, 10.0);
            let lhs = x.cof_t().mul(&J);
            let rhs = J.mul(&x);
            assert!(lhs.sub(&rhs).frobenius() <= 1e-12);
        }
    }

    #[test]
    fn det_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..1000 {
            let a = rand_mat2(&mut rng, 10.0);
            let b = rand_mat2(&mut rng, 10.0);
            assert!((a.mul(&b).det() - a.det() * b.det()).abs() <= 1e-9);
        }
    }

    #[test]
    fn minor_det_of_lifted_identity() {
        // Stack (Id; 2 Id; J): the lift of the identity under g(t) = t^2.
        let a = Stacked62::new(Mat2::identity(), Mat2::identity().scale(2.0), J);
        assert_eq!(minor_det(&a, MinorIndex::new(1, 2).unwrap()), 1.0);
        // Row 3 = 2 * row 1, so the (1,3) minor vanishes.
        assert_eq!(minor_det(&a, MinorIndex::new(1, 3).unwrap()), 0.0);
    }

    #[test]
    fn minor_antisymmetric_in_raw_rows() {
        let a = Stacked62::new(
            Mat2::new(1.0, 2.0, 3.0, 4.0),
            Mat2::new(-1.0, 0.5, 2.0, 7.0),
            Mat2::new(0.0, 1.0, -3.0, 2.0),
        );
        for idx in MinorIndex::all() {
            let forward = Mat2::from_rows(a.row(idx.i()), a.row(idx.j())).det();
            let swapped = Mat2::from_rows(a.row(idx.j()), a.row(idx.i())).det();
            assert!((forward + swapped).abs() <= 1e-12);
            assert_eq!(minor_det(&a, idx), forward);
        }
    }

    #[test]
    fn minor_index_validation() {
        assert!(MinorIndex::new(1, 2).is_ok());
        assert!(MinorIndex::new(2, 2).is_err());
        assert!(MinorIndex::new(3, 1).is_err());
        assert!(MinorIndex::new(0, 4).is_err());
        assert!(MinorIndex::new(5, 7).is_err());
        assert_eq!(MinorIndex::all().len(), 15);
    }

    #[test]
    fn stacked_round_trip_is_lossless() {
        let rows = [
            Vec2::new(1.0, 2.0),
            Vec2::new(3.0, 4.0),
            Vec2::new(5.0, 6.0),
            Vec2::new(7.0, 8.0),
            Vec2::new(9.0, 10.0),
            Vec2::new(11.0, 12.0),
        ];
        let a = Stacked62::from_rows(rows);
        assert_eq!(a.rows(), rows);
    }

    #[test]
    fn rank_one_gap_zero_difference() {
        let a = Mat2::new(1.0, 2.0, 3.0, 4.0);
        let g = rank_one_gap(&a, &a);
        assert_eq!(g.rank, 0);
        assert!(g.factors.is_none());
    }

    #[test]
    fn rank_one_gap_shear_pair() {
        let a = Mat2::identity();
        let b = Mat2::new(1.0, 1.0, 0.0, 1.0);
        let g = rank_one_gap(&a, &b);
        assert_eq!(g.rank, 1);
        let (gap, dir) = g.factors.unwrap();
        assert!((gap.x - 1.0).abs() <= 1e-12 && gap.y.abs() <= 1e-12);
        assert!(dir.x.abs() <= 1e-12 && (dir.y - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn rank_one_gap_full_rank() {
        let g = rank_one_gap(&Mat2::identity(), &Mat2::identity().scale(2.0));
        assert_eq!(g.rank, 2);
        let g = rank_one_gap(&Mat2::identity(), &Mat2::diag(2.0, 0.5));
        assert_eq!(g.rank, 2);
    }

    #[test]
    fn rank_one_factorization_reconstructs_gap() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let a = rand_mat2(&mut rng, 5.0);
            let gap = Vec2::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let dir = Vec2::new(theta.cos(), theta.sin());
            let b = a.add(&gap.outer(dir));
            let g = rank_one_gap(&a, &b);
            if g.rank == 1 {
                let (ga, di) = g.factors.unwrap();
                let recon = ga.outer(di);
                assert!(b.sub(&a).sub(&recon).frobenius() <= 1e-10);
            } else {
                // Degenerate draw: the sampled gap was below threshold.
                assert!(gap.norm() <= 1e-8);
            }
        }
    }

    #[test]
    fn singular_values_orthogonal_matrix() {
        let (s1, s2) = J.singular_values();
        assert!((s1 - 1.0).abs() <= 1e-14 && (s2 - 1.0).abs() <= 1e-14);
    }
}
