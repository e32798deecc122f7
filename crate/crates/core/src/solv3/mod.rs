//! Torus bundles `T³_A` with hyperbolic monodromy `A ∈ SL(2,ℤ)`.
//!
//! Two bundles are isometric iff `A` is `GL(2,ℤ)`-conjugate to `B` or `B⁻¹`.
//! They are commensurable iff their dilatations (the eigenvalues `λ > 1`) are
//! multiplicatively commensurable. Both dilatations are units of the same
//! rank-one unit group exactly when they generate the same real quadratic
//! field, so commensurability classes correspond to fields `ℚ(√d)`; the
//! decision here is by the squarefree part of `trace² − 4`.

pub mod forms;
pub mod quadratic;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{isqrt_u128, squarefree_part_of_product};
use forms::{mat_det, mat_mul, proper_equivalence, BinaryForm, Mat2};
pub use quadratic::{QuadField, QuadNumber};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Solv3Error {
    #[error("determinant is {0}, expected 1")]
    NotUnimodular(i128),
    #[error("|trace| = {0} <= 2, matrix is not hyperbolic")]
    NotHyperbolic(i128),
    #[error("{0} is not a squarefree integer >= 2")]
    NotSquarefree(u64),
    #[error("cannot parse matrix {0:?}: expected \"a,b;c,d\"")]
    Parse(String),
    #[error("entries too large for exact 128-bit evaluation")]
    Overflow,
}

/// A matrix in SL(2,ℤ) with `|trace| > 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[[i128; 2]; 2]", into = "[[i128; 2]; 2]")]
pub struct HypMatrix {
    a: i128,
    b: i128,
    c: i128,
    d: i128,
}

impl TryFrom<[[i128; 2]; 2]> for HypMatrix {
    type Error = Solv3Error;
    fn try_from(m: [[i128; 2]; 2]) -> Result<Self, Solv3Error> {
        HypMatrix::new(m[0][0], m[0][1], m[1][0], m[1][1])
    }
}

impl From<HypMatrix> for [[i128; 2]; 2] {
    fn from(m: HypMatrix) -> Self {
        [[m.a, m.b], [m.c, m.d]]
    }
}

/// `|trace| > 2` for a determinant-one integer matrix.
pub fn is_hyperbolic(m: [[i128; 2]; 2]) -> Result<bool, Solv3Error> {
    let [[a, b], [c, d]] = m;
    let det = a
        .checked_mul(d)
        .zip(b.checked_mul(c))
        .and_then(|(x, y)| x.checked_sub(y))
        .ok_or(Solv3Error::Overflow)?;
    if det != 1 {
        return Err(Solv3Error::NotUnimodular(det));
    }
    Ok(a.checked_add(d).ok_or(Solv3Error::Overflow)?.abs() > 2)
}

impl HypMatrix {
    pub fn new(a: i128, b: i128, c: i128, d: i128) -> Result<Self, Solv3Error> {
        if !is_hyperbolic([[a, b], [c, d]])? {
            return Err(Solv3Error::NotHyperbolic(a + d));
        }
        Ok(Self { a, b, c, d })
    }

    pub fn entries(&self) -> [[i128; 2]; 2] {
        (*self).into()
    }

    pub fn trace(&self) -> i128 {
        self.a + self.d
    }

    pub fn inverse(&self) -> Self {
        Self { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn checked_mul(&self, o: &Self) -> Result<Self, Solv3Error> {
        let f = |x: i128, y: i128, z: i128, w: i128| {
            x.checked_mul(y).zip(z.checked_mul(w)).and_then(|(p, q)| p.checked_add(q))
        };
        let m = (|| {
            Some([
                [f(self.a, o.a, self.b, o.c)?, f(self.a, o.b, self.b, o.d)?],
                [f(self.c, o.a, self.d, o.c)?, f(self.c, o.b, self.d, o.d)?],
            ])
        })()
        .ok_or(Solv3Error::Overflow)?;
        Self::try_from(m)
    }

    pub fn pow(&self, n: u32) -> Result<Self, Solv3Error> {
        let mut acc = *self;
        for _ in 1..n.max(1) {
            acc = acc.checked_mul(self)?;
        }
        Ok(acc)
    }

    fn to_big(self) -> Mat2 {
        [
            [BigInt::from(self.a), BigInt::from(self.b)],
            [BigInt::from(self.c), BigInt::from(self.d)],
        ]
    }

    /// `f_A(x, y) = det((x,y), A(x,y)) = c·x² + (d−a)·xy − b·y²`, whose roots
    /// are the fixed points of the Möbius action of `A`.
    pub fn fixed_point_form(&self) -> BinaryForm {
        BinaryForm::new(BigInt::from(self.c), BigInt::from(self.d - self.a), BigInt::from(-self.b))
    }
}

impl FromStr for HypMatrix {
    type Err = Solv3Error;

    /// `"a,b;c,d"`.
    fn from_str(s: &str) -> Result<Self, Solv3Error> {
        let err = || Solv3Error::Parse(s.to_string());
        let rows: Vec<Vec<i128>> = s
            .split(';')
            .map(|r| r.split(',').map(|x| x.trim().parse::<i128>()).collect::<Result<Vec<_>, _>>())
            .collect::<Result<_, _>>()
            .map_err(|_| err())?;
        match rows.as_slice() {
            [r0, r1] if r0.len() == 2 && r1.len() == 2 => HypMatrix::new(r0[0], r0[1], r1[0], r1[1]),
            _ => Err(err()),
        }
    }
}

impl fmt::Display for HypMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{};{},{}", self.a, self.b, self.c, self.d)
    }
}

/// `(d, f)` with `trace² − 4 = d·f²`, `d` squarefree.
fn discriminant_split(a: &HypMatrix) -> Result<(u64, u128), Solv3Error> {
    let t = a.trace().unsigned_abs();
    let lo = u64::try_from(t - 2).map_err(|_| Solv3Error::Overflow)?;
    let hi = u64::try_from(t + 2).map_err(|_| Solv3Error::Overflow)?;
    let d = squarefree_part_of_product(&[lo, hi]).ok_or(Solv3Error::Overflow)?;
    let disc = t.checked_mul(t).ok_or(Solv3Error::Overflow)? - 4;
    let f = isqrt_u128(disc / d);
    debug_assert_eq!(d * f * f, disc);
    Ok((u64::try_from(d).map_err(|_| Solv3Error::Overflow)?, f))
}

/// `ℚ(√(trace² − 4))`, the field containing the eigenvalues.
pub fn field_invariant(a: &HypMatrix) -> Result<QuadField, Solv3Error> {
    let (d, _) = discriminant_split(a)?;
    QuadField::new(d)
}

/// Eigenvalues and eigen-slopes of a hyperbolic matrix, exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EigenData {
    pub field: QuadField,
    /// Expanding eigenvalue, `|λ| > 1`.
    pub lambda: QuadNumber,
    pub lambda_inv: QuadNumber,
    /// Slope `y/x` of the eigenline for `λ`.
    pub expanding_slope: QuadNumber,
    pub contracting_slope: QuadNumber,
}

pub fn eigen_data(a: &HypMatrix) -> Result<EigenData, Solv3Error> {
    let (d, f) = discriminant_split(a)?;
    let field = QuadField::new(d)?;
    let t = a.trace();
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let sign = if t > 0 { 1 } else { -1 };
    let lambda = QuadNumber::new(
        d,
        BigRational::from_integer(BigInt::from(t)) * &half,
        BigRational::from_integer(BigInt::from(f) * sign) * &half,
    );
    let lambda_inv = lambda.conj();
    // eigenvector (b, μ − a) since b ≠ 0 for hyperbolic A
    let slope = |mu: &QuadNumber| {
        let shifted = mu.sub(&QuadNumber::rational(d, BigRational::from_integer(BigInt::from(a.a))));
        shifted.scale(&BigRational::new(BigInt::one(), BigInt::from(a.b)))
    };
    let data = EigenData {
        field,
        expanding_slope: slope(&lambda),
        contracting_slope: slope(&lambda_inv),
        lambda,
        lambda_inv,
    };
    debug_assert!(data.lambda.mul(&data.lambda_inv).is_one());
    Ok(data)
}

/// Some `P ∈ GL(2,ℤ)` with `P·A·P⁻¹ = B`, if one exists.
///
/// Conjugation preserves the trace and the content of `f_A`, and
/// `f_{PAP⁻¹} = det(P)·(f_A ∘ P⁻¹)`. A matrix is recovered from its trace
/// and fixed-point form, so conjugacy is proper equivalence of `f_B` with
/// `f_A` (for `det P = 1`) or with the twisted form (for `det P = −1`).
pub fn gl2z_conjugator(a: &HypMatrix, b: &HypMatrix) -> Option<Mat2> {
    if a.trace() != b.trace() {
        return None;
    }
    let (fa, fb) = (a.fixed_point_form(), b.fixed_point_form());
    if fa.content() != fb.content() {
        return None;
    }
    let (pa, pb) = (fa.primitive(), fb.primitive());
    let candidate = if let Some(m) = proper_equivalence(&pa, &pb) {
        // f_B = f_A ∘ M  ⇒  P = M⁻¹
        forms::mat_inv_unimodular(&m)
    } else {
        // twist(f_B) = f_A ∘ M  ⇒  f_B = −(f_A ∘ M ∘ J), P = (M·J)⁻¹
        let m = proper_equivalence(&pa, &pb.twist())?;
        let j: Mat2 = [[BigInt::one(), 0.into()], [0.into(), BigInt::from(-1)]];
        forms::mat_inv_unimodular(&mat_mul(&m, &j))
    };
    // certify: P·A = B·P
    let (ab, bb) = (a.to_big(), b.to_big());
    (mat_mul(&candidate, &ab) == mat_mul(&bb, &candidate) && mat_det(&candidate).abs().is_one())
        .then_some(candidate)
}

pub fn gl2z_conjugate(a: &HypMatrix, b: &HypMatrix) -> bool {
    gl2z_conjugator(a, b).is_some()
}

/// `T³_A` and `T³_B` are isometric iff `A ~ B` or `A ~ B⁻¹` in `GL(2,ℤ)`.
pub fn isometric_bundles(a: &HypMatrix, b: &HypMatrix) -> bool {
    gl2z_conjugate(a, b) || gl2z_conjugate(a, &b.inverse())
}

/// Commensurability of `T³_A` and `T³_B`: equality of the quadratic fields of
/// their dilatations.
pub fn commensurable_bundles(a: &HypMatrix, b: &HypMatrix) -> Result<bool, Solv3Error> {
    Ok(field_invariant(a)? == field_invariant(b)?)
}

/// Smallest unit `ε > 1` of the ring of integers of the field.
pub fn fundamental_unit(f: QuadField) -> QuadNumber {
    f.fundamental_unit()
}

/// Monodromy of the canonical bundle of a field: multiplication by the unit
/// `u` on the basis `{1, ω}` of the ring of integers, where `u = ε` when
/// `N(ε) = 1` and `u = ε²` otherwise.
pub fn matrix_from_field(f: QuadField) -> Result<HypMatrix, Solv3Error> {
    let (t, n) = f.omega_trace_norm();
    let (mut p, mut q) = f.fundamental_unit_coords();
    if f.basis_norm(&p, &q).is_negative() {
        // (p + qω)² = p² − q²N + (2pq + q²T)ω
        let (p2, q2) = (&p * &p - &q * &q * &n, BigInt::from(2) * &p * &q + &q * &q * &t);
        p = p2;
        q = q2;
    }
    // u·1 = p + qω, u·ω = −qN + (p + qT)ω, as columns
    let entries = [&p, &(-&q * &n), &q, &(&p + &q * &t)];
    let e: Vec<i128> = entries.iter().map(|x| x.to_i128().ok_or(Solv3Error::Overflow)).collect::<Result<_, _>>()?;
    HypMatrix::new(e[0], e[1], e[2], e[3])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(s: &str) -> HypMatrix {
        s.parse().unwrap()
    }

    #[test]
    fn hyperbolicity() {
        assert!(is_hyperbolic([[2, 1], [1, 1]]).unwrap());
        assert!(!is_hyperbolic([[1, 1], [0, 1]]).unwrap());
        assert!(!is_hyperbolic([[0, -1], [1, 0]]).unwrap());
        assert_eq!(is_hyperbolic([[2, 0], [0, 1]]), Err(Solv3Error::NotUnimodular(2)));
        assert!("1,1;0,1".parse::<HypMatrix>().is_err());
        assert!("1,2,3".parse::<HypMatrix>().is_err());
    }

    #[test]
    fn field_examples() {
        assert_eq!(field_invariant(&m("2,1;1,1")).unwrap().d(), 5);
        // trace 6 → 32 → 2
        assert_eq!(field_invariant(&m("5,4;1,1")).unwrap().d(), 2);
        // trace 4 → 12 → 3
        assert_eq!(field_invariant(&m("3,2;1,1")).unwrap().d(), 3);
        assert_eq!(field_invariant(&m("-3,1;-1,0")).unwrap().d(), 5);
    }

    #[test]
    fn eigen_examples() {
        let e = eigen_data(&m("2,1;1,1")).unwrap();
        assert_eq!(e.lambda.to_string(), "(3+sqrt5)/2");
        assert_eq!(eigen_data(&m("1,1;1,2")).unwrap().lambda.to_string(), "(3+sqrt5)/2");
        assert_eq!(eigen_data(&m("3,4;2,3")).unwrap().lambda.to_string(), "3+2sqrt2");
        let neg = eigen_data(&m("-3,-4;-2,-3")).unwrap();
        assert!(neg.lambda.to_f64() < -1.0);
    }

    #[test]
    fn eigen_slopes_are_eigenvectors() {
        for s in ["2,1;1,1", "3,4;2,3", "5,-3;-3,2", "-4,1;-1,0"] {
            let a = m(s);
            let e = eigen_data(&a).unwrap();
            let d = e.field.d();
            let [[p, q], [r, t]] = a.entries();
            let int = |x: i128| QuadNumber::rational(d, BigRational::from_integer(x.into()));
            for (mu, slope) in [(&e.lambda, &e.expanding_slope), (&e.lambda_inv, &e.contracting_slope)] {
                // A·(1, s) = μ·(1, s)
                let x = int(p).add(&int(q).mul(slope));
                let y = int(r).add(&int(t).mul(slope));
                assert_eq!(&x, mu);
                assert_eq!(y, mu.mul(slope));
            }
        }
    }

    #[test]
    fn conjugacy_examples() {
        let a = m("2,1;1,1");
        assert!(gl2z_conjugate(&a, &a));
        let p = m("2,1;1,1"); // any unimodular conjugator
        let b = p.checked_mul(&a).unwrap().checked_mul(&p.inverse()).unwrap();
        assert!(gl2z_conjugate(&a, &b));
        let shear_conj = HypMatrix::new(3, -1, 1, 0).unwrap(); // [[1,1],[0,1]]·A·[[1,-1],[0,1]]
        assert!(gl2z_conjugate(&a, &shear_conj));
        assert!(!gl2z_conjugate(&a, &m("3,1;2,1")));
        // swap conjugates [[2,1],[1,1]] to [[1,1],[1,2]]
        assert!(gl2z_conjugate(&a, &m("1,1;1,2")));
    }

    #[test]
    fn bundle_examples() {
        let a = m("2,1;1,1");
        assert!(isometric_bundles(&a, &a.inverse()));
        assert!(!isometric_bundles(&a, &m("3,4;2,3")));
        assert!(commensurable_bundles(&a, &a.pow(2).unwrap()).unwrap());
        assert!(commensurable_bundles(&a, &m("1,1;1,2")).unwrap());
        assert!(!commensurable_bundles(&a, &m("3,4;2,3")).unwrap());
        assert!(!isometric_bundles(&a, &a.pow(2).unwrap()));
    }

    #[test]
    fn field_matrices() {
        assert_eq!(matrix_from_field(QuadField::new(5).unwrap()).unwrap(), m("1,1;1,2"));
        assert_eq!(matrix_from_field(QuadField::new(2).unwrap()).unwrap(), m("3,4;2,3"));
        assert_eq!(matrix_from_field(QuadField::new(3).unwrap()).unwrap(), m("2,3;1,2"));
    }

    #[test]
    fn json_shape() {
        let a = m("2,1;1,1");
        assert_eq!(serde_json::to_value(a).unwrap(), serde_json::json!([[2, 1], [1, 1]]));
        assert!(serde_json::from_value::<HypMatrix>(serde_json::json!([[1, 1], [0, 1]])).is_err());
    }
}
