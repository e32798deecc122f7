//! Dense integer matrices with Hermite and Smith normal forms.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn scalar(n: usize, s: i64) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::from(s);
        }
        m
    }

    pub fn diagonal(entries: &[i64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = BigInt::from(e);
        }
        m
    }

    /// Rows must all have the same length.
    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Option<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return None;
        }
        Some(Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
            .expect("rectangular literal")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        self.data.chunks(self.cols.max(1)).take(self.rows).map(<[BigInt]>::to_vec).collect()
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * &other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| &self[(i, j)] * &v[j]).sum())
            .collect()
    }

    /// Fraction-free Bareiss elimination.
    pub fn det(&self) -> BigInt {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !a[(i, k)].is_zero()) else {
                    return BigInt::zero();
                };
                a.swap_rows(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)];
                    a[(i, j)] = v / &prev;
                }
            }
            prev = a[(k, k)].clone();
        }
        sign * &a[(n - 1, n - 1)]
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].is_zero()))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    // col_a <- x*col_a + y*col_b ; col_b <- z*col_a + w*col_b (simultaneously)
    fn mix_cols(&mut self, a: usize, b: usize, x: &BigInt, y: &BigInt, z: &BigInt, w: &BigInt) {
        for i in 0..self.rows {
            let (va, vb) = (self[(i, a)].clone(), self[(i, b)].clone());
            self[(i, a)] = x * &va + y * &vb;
            self[(i, b)] = z * &va + w * &vb;
        }
    }

    fn mix_rows(&mut self, a: usize, b: usize, x: &BigInt, y: &BigInt, z: &BigInt, w: &BigInt) {
        for j in 0..self.cols {
            let (va, vb) = (self[(a, j)].clone(), self[(b, j)].clone());
            self[(a, j)] = x * &va + y * &vb;
            self[(b, j)] = z * &va + w * &vb;
        }
    }

    /// Lower-triangular Hermite normal form of the column lattice of a
    /// nonsingular square matrix: `H = M·U` with `U` unimodular, positive
    /// diagonal, and `0 ≤ H[i][j] < H[i][i]` for `j < i`.
    pub fn column_hermite(&self) -> Self {
        assert!(self.is_square());
        let n = self.rows;
        let mut h = self.clone();
        for i in 0..n {
            for j in i + 1..n {
                if h[(i, j)].is_zero() {
                    continue;
                }
                let (a, b) = (h[(i, i)].clone(), h[(i, j)].clone());
                let eg = a.extended_gcd(&b);
                let (x, y, g) = (eg.x, eg.y, eg.gcd);
                h.mix_cols(i, j, &x, &y, &(-&b / &g), &(&a / &g));
            }
            if h[(i, i)].is_negative() {
                for r in 0..n {
                    h[(r, i)] = -&h[(r, i)];
                }
            }
            let d = h[(i, i)].clone();
            assert!(!d.is_zero(), "column_hermite on a singular matrix");
            for j in 0..i {
                let q = h[(i, j)].div_floor(&d);
                if !q.is_zero() {
                    for r in 0..n {
                        let v = &q * &h[(r, i)];
                        h[(r, j)] -= v;
                    }
                }
            }
        }
        h
    }

    /// Diagonal of the Smith normal form: `d_1 | d_2 | … | d_r`, all positive,
    /// followed by zeros for rank-deficient input.
    pub fn smith_diagonal(&self) -> Vec<BigInt> {
        let mut a = self.clone();
        let (m, n) = (a.rows, a.cols);
        let mut out = Vec::new();
        for t in 0..m.min(n) {
            // pivot: smallest nonzero entry of the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    if !a[(i, j)].is_zero()
                        && best.map_or(true, |(bi, bj)| a[(i, j)].abs() < a[(bi, bj)].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                out.extend(std::iter::repeat(BigInt::zero()).take(m.min(n) - t));
                break;
            };
            a.swap_rows(t, pi);
            a.swap_cols(t, pj);
            loop {
                let mut dirty = false;
                for i in t + 1..m {
                    if a[(i, t)].is_zero() {
                        continue;
                    }
                    let (x, y, z, w) = eliminator(&a[(t, t)], &a[(i, t)]);
                    a.mix_rows(t, i, &x, &y, &z, &w);
                    dirty = true;
                }
                for j in t + 1..n {
                    if a[(t, j)].is_zero() {
                        continue;
                    }
                    let (x, y, z, w) = eliminator(&a[(t, t)], &a[(t, j)]);
                    a.mix_cols(t, j, &x, &y, &z, &w);
                    dirty = true;
                }
                if dirty {
                    continue;
                }
                let p = a[(t, t)].clone();
                let offender = (t + 1..m)
                    .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                    .find(|&(i, j)| !a[(i, j)].is_multiple_of(&p));
                match offender {
                    Some((i, _)) => {
                        let one = BigInt::one();
                        let zero = BigInt::zero();
                        a.mix_rows(t, i, &one, &one, &zero, &one);
                    }
                    None => break,
                }
            }
            out.push(a[(t, t)].abs());
        }
        out
    }
}

// Unimodular 2x2 step sending (p, v) to (g, 0). Plain subtraction when p | v,
// so the pivot line is left alone and the reduction cannot cycle.
fn eliminator(p: &BigInt, v: &BigInt) -> (BigInt, BigInt, BigInt, BigInt) {
    if v.is_multiple_of(p) {
        return (BigInt::one(), BigInt::zero(), -(v / p), BigInt::one());
    }
    let eg = p.extended_gcd(v);
    (eg.x, eg.y, -(v / &eg.gcd), p / &eg.gcd)
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .to_rows()
            .iter()
            .map(|r| r.iter().map(ToString::to_string).collect::<Vec<_>>().join(","))
            .collect();
        write!(f, "{}", rows.join(";"))
    }
}

/// Reduce `v` modulo the column lattice of a lower-triangular Hermite form,
/// giving the canonical representative with `0 ≤ v_i < H[i][i]`.
pub fn reduce_mod_hermite(h: &IntMatrix, v: &[BigInt]) -> Vec<BigInt> {
    let mut v = v.to_vec();
    for i in 0..h.rows() {
        let q = v[i].div_floor(&h[(i, i)]);
        if !q.is_zero() {
            for (r, vr) in v.iter_mut().enumerate().skip(i) {
                *vr -= &q * &h[(r, i)];
            }
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn determinant() {
        assert_eq!(IntMatrix::from_i64(&[&[2, 1], &[1, 1]]).det(), b(1));
        assert_eq!(IntMatrix::from_i64(&[&[0, 1], &[1, 0]]).det(), b(-1));
        assert_eq!(IntMatrix::from_i64(&[&[2, 0, 1], &[1, 3, 2], &[1, 1, 2]]).det(), b(6));
        assert_eq!(IntMatrix::from_i64(&[&[1, 2], &[2, 4]]).det(), b(0));
    }

    #[test]
    fn smith_examples() {
        assert_eq!(IntMatrix::diagonal(&[2, 3]).smith_diagonal(), vec![b(1), b(6)]);
        assert_eq!(IntMatrix::scalar(2, 2).smith_diagonal(), vec![b(2), b(2)]);
        let m = IntMatrix::from_i64(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        assert_eq!(m.smith_diagonal(), vec![b(2), b(6), b(12)]);
        assert_eq!(IntMatrix::from_i64(&[&[1, 2], &[2, 4]]).smith_diagonal(), vec![b(1), b(0)]);
    }

    #[test]
    fn hermite_is_canonical() {
        let m = IntMatrix::from_i64(&[&[2, 1], &[1, 1]]);
        assert_eq!(m.column_hermite(), IntMatrix::identity(2));
        let m = IntMatrix::from_i64(&[&[4, 2], &[0, 6]]);
        let h = m.column_hermite();
        // same lattice from a different basis
        let m2 = IntMatrix::from_i64(&[&[6, 2], &[6, 6]]);
        assert_eq!(h, m2.column_hermite());
        assert_eq!(h[(0, 1)], b(0));
        assert!(h[(1, 0)] < h[(1, 1)]);
    }

    #[test]
    fn reduction_lands_in_box() {
        let h = IntMatrix::from_i64(&[&[3, 7], &[2, 5]]).column_hermite();
        for x in -10..10 {
            for y in -10..10 {
                let r = reduce_mod_hermite(&h, &[b(x), b(y)]);
                for i in 0..2 {
                    assert!(!r[i].is_negative() && r[i] < h[(i, i)]);
                }
            }
        }
    }

    #[test]
    fn smith_with_unit_pivot_terminates() {
        let m = IntMatrix::from_i64(&[&[-4, 4, 4], &[4, -1, -1], &[-5, 3, 4]]);
        let s = m.smith_diagonal();
        assert_eq!(s, vec![b(1), b(1), m.det().abs()]);
    }
}
