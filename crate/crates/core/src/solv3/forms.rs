//! Indefinite binary quadratic forms: reduction and cycles.
//!
//! For `A ∈ SL(2,ℤ)` the form `f_A(v) = det(v, Av)` satisfies
//! `f_{PAP⁻¹}(v) = det(P)·f_A(P⁻¹v)`, so `GL(2,ℤ)`-conjugacy of matrices with
//! equal trace reduces to proper equivalence of forms, which is decided by
//! comparing cycles of reduced forms under the normalization operator ρ.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// `a·x² + b·xy + c·y²`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryForm {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

/// 2×2 integer matrix, row-major.
pub type Mat2 = [[BigInt; 2]; 2];

pub fn mat_mul(x: &Mat2, y: &Mat2) -> Mat2 {
    [
        [&x[0][0] * &y[0][0] + &x[0][1] * &y[1][0], &x[0][0] * &y[0][1] + &x[0][1] * &y[1][1]],
        [&x[1][0] * &y[0][0] + &x[1][1] * &y[1][0], &x[1][0] * &y[0][1] + &x[1][1] * &y[1][1]],
    ]
}

pub fn mat_det(x: &Mat2) -> BigInt {
    &x[0][0] * &x[1][1] - &x[0][1] * &x[1][0]
}

/// Inverse of a matrix with determinant ±1.
pub fn mat_inv_unimodular(x: &Mat2) -> Mat2 {
    let det = mat_det(x);
    debug_assert!(det.abs().is_one());
    [
        [&x[1][1] * &det, -&x[0][1] * &det],
        [-&x[1][0] * &det, &x[0][0] * &det],
    ]
}

pub fn mat_identity() -> Mat2 {
    [[BigInt::one(), BigInt::zero()], [BigInt::zero(), BigInt::one()]]
}

const CYCLE_GUARD: usize = 10_000_000;

impl BinaryForm {
    pub fn new(a: BigInt, b: BigInt, c: BigInt) -> Self {
        Self { a, b, c }
    }

    pub fn discriminant(&self) -> BigInt {
        &self.b * &self.b - BigInt::from(4) * &self.a * &self.c
    }

    pub fn content(&self) -> BigInt {
        self.a.gcd(&self.b).gcd(&self.c)
    }

    pub fn primitive(&self) -> Self {
        let g = self.content();
        Self { a: &self.a / &g, b: &self.b / &g, c: &self.c / &g }
    }

    /// `f ∘ M`, i.e. `v ↦ f(Mv)`.
    pub fn compose(&self, m: &Mat2) -> Self {
        let [[p, q], [r, s]] = m;
        let (a, b, c) = (&self.a, &self.b, &self.c);
        Self {
            a: a * p * p + b * p * r + c * r * r,
            b: BigInt::from(2) * a * p * q + b * (p * s + q * r) + BigInt::from(2) * c * r * s,
            c: a * q * q + b * q * s + c * s * s,
        }
    }

    /// `(a, b, c) ↦ (−a, b, −c)`, which is `−(f ∘ diag(1, −1))`.
    pub fn twist(&self) -> Self {
        Self { a: -&self.a, b: self.b.clone(), c: -&self.c }
    }

    pub fn is_reduced(&self, sqrt_floor: &BigInt) -> bool {
        let two_a = BigInt::from(2) * self.a.abs();
        self.b.is_positive()
            && &self.b <= sqrt_floor
            && &(&two_a + &self.b) > sqrt_floor
            && &(&two_a - &self.b) <= sqrt_floor
    }

    /// One normalization step `ρ(a, b, c) = (c, r, (r² − D)/4c)` together with
    /// the matrix `M` such that `ρ(f) = f ∘ M`.
    pub fn rho(&self, disc: &BigInt, sqrt_floor: &BigInt) -> (Self, Mat2) {
        let c_abs = self.c.abs();
        let two_c = BigInt::from(2) * &c_abs;
        let nb = -&self.b;
        let r = if &c_abs > sqrt_floor {
            let mut r = nb.mod_floor(&two_c);
            if r > c_abs {
                r -= &two_c;
            }
            r
        } else {
            sqrt_floor - (sqrt_floor - &nb).mod_floor(&two_c)
        };
        let s = (&r + &self.b) / (BigInt::from(2) * &self.c);
        let next = Self { a: self.c.clone(), c: (&r * &r - disc) / (BigInt::from(4) * &self.c), b: r };
        let m = [[BigInt::zero(), BigInt::from(-1)], [BigInt::one(), s]];
        (next, m)
    }

    /// A reduced form properly equivalent to `self`, with `M ∈ SL(2,ℤ)` such
    /// that the result is `self ∘ M`. The discriminant must be a positive
    /// non-square.
    pub fn reduce(&self) -> (Self, Mat2) {
        let disc = self.discriminant();
        let s = disc.sqrt();
        let mut f = self.clone();
        let mut m = mat_identity();
        let mut guard = 0;
        while !f.is_reduced(&s) {
            let (g, step) = f.rho(&disc, &s);
            f = g;
            m = mat_mul(&m, &step);
            guard += 1;
            assert!(guard < CYCLE_GUARD, "reduction did not terminate");
        }
        (f, m)
    }

    /// The ρ-cycle of a reduced form, with cumulative matrices: entry `k` is
    /// `(ρᵏ(f), Rₖ)` where `ρᵏ(f) = f ∘ Rₖ`.
    pub fn cycle(&self) -> Vec<(Self, Mat2)> {
        let disc = self.discriminant();
        let s = disc.sqrt();
        debug_assert!(self.is_reduced(&s));
        let mut out = vec![(self.clone(), mat_identity())];
        loop {
            let (f, m) = out.last().expect("nonempty");
            let (g, step) = f.rho(&disc, &s);
            if &g == self {
                return out;
            }
            let cum = mat_mul(m, &step);
            out.push((g, cum));
            assert!(out.len() < CYCLE_GUARD, "cycle did not close");
        }
    }
}

/// Some `M ∈ SL(2,ℤ)` with `g = f ∘ M`, if the forms are properly equivalent.
pub fn proper_equivalence(f: &BinaryForm, g: &BinaryForm) -> Option<Mat2> {
    if f.discriminant() != g.discriminant() {
        return None;
    }
    let (rf, mf) = f.reduce();
    let (rg, mg) = g.reduce();
    // f∘mf∘R = rg = g∘mg  ⇒  g = f∘(mf·R·mg⁻¹)
    rf.cycle()
        .into_iter()
        .find(|(h, _)| h == &rg)
        .map(|(_, r)| mat_mul(&mat_mul(&mf, &r), &mat_inv_unimodular(&mg)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form(a: i64, b: i64, c: i64) -> BinaryForm {
        BinaryForm::new(a.into(), b.into(), c.into())
    }

    #[test]
    fn compose_matches_substitution() {
        let f = form(3, 5, -7);
        let m: Mat2 = [[2.into(), 1.into()], [7.into(), 4.into()]];
        let g = f.compose(&m);
        for (x, y) in [(1i64, 0i64), (0, 1), (2, -3), (5, 7)] {
            let (u, v) = (2 * x + y, 7 * x + 4 * y);
            let lhs = 3 * u * u + 5 * u * v - 7 * v * v;
            let rhs = &g.a * x * x + &g.b * x * y + &g.c * y * y;
            assert_eq!(BigInt::from(lhs), rhs);
        }
        assert_eq!(g.discriminant(), f.discriminant());
    }

    #[test]
    fn reduction_is_equivalence() {
        for (a, b, c) in [(1, 1, -1), (5, 13, 2), (-7, 3, 11), (100, 1, -3), (2, 9, 1)] {
            let f = form(a, b, c);
            let (r, m) = f.reduce();
            assert!(r.is_reduced(&f.discriminant().sqrt()));
            assert_eq!(f.compose(&m), r);
            assert!(mat_det(&m).is_one());
            for (h, cm) in r.cycle() {
                assert_eq!(r.compose(&cm), h);
            }
        }
    }

    #[test]
    fn equivalent_forms_share_cycles() {
        let f = form(1, 1, -1);
        let m: Mat2 = [[3.into(), 2.into()], [4.into(), 3.into()]];
        let g = f.compose(&m);
        let w = proper_equivalence(&f, &g).expect("equivalent by construction");
        assert_eq!(f.compose(&w), g);
        // x² − 3y² and −x² + 3y² are not properly equivalent
        assert!(proper_equivalence(&form(1, 0, -3), &form(-1, 0, 3)).is_none());
    }
}
