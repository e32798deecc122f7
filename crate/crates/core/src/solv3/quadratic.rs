//! Real quadratic fields `ℚ(√d)`, exact elements, and fundamental units.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::Solv3Error;
use crate::arith::is_squarefree;

/// `ℚ(√d)` for squarefree `d ≥ 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuadField {
    d: u64,
}

impl QuadField {
    pub fn new(d: u64) -> Result<Self, Solv3Error> {
        if d < 2 || !is_squarefree(d) {
            return Err(Solv3Error::NotSquarefree(d));
        }
        Ok(Self { d })
    }

    pub fn d(self) -> u64 {
        self.d
    }

    /// Whether the ring of integers has the half-integral basis
    /// `{1, (1+√d)/2}`.
    pub fn is_one_mod_four(self) -> bool {
        self.d % 4 == 1
    }

    /// `(T, N)` with `ω² = T·ω − N` for the integral basis element ω.
    pub fn omega_trace_norm(self) -> (BigInt, BigInt) {
        let d = BigInt::from(self.d);
        if self.is_one_mod_four() {
            (BigInt::one(), (BigInt::one() - d) / 4)
        } else {
            (BigInt::zero(), -d)
        }
    }

    /// The element `x + y·ω`.
    pub fn from_basis(self, x: &BigInt, y: &BigInt) -> QuadNumber {
        let (x, y) = (BigRational::from(x.clone()), BigRational::from(y.clone()));
        if self.is_one_mod_four() {
            let half = BigRational::new(BigInt::one(), BigInt::from(2));
            QuadNumber { d: self.d, x: x + &y * &half, y: y * half }
        } else {
            QuadNumber { d: self.d, x, y }
        }
    }

    /// Norm of `x + y·ω`.
    pub fn basis_norm(self, x: &BigInt, y: &BigInt) -> BigInt {
        let (t, n) = self.omega_trace_norm();
        x * x + &t * x * y + n * y * y
    }

    /// Smallest unit `ε > 1` of the ring of integers, as basis coordinates
    /// `(x, y)` with `ε = x + y·ω`.
    ///
    /// A unit `x + yω > 1` has `x + yω̄` tiny, so `x/y` is a convergent of
    /// `θ = −ω̄`; the first convergent of norm `±1` is the fundamental unit.
    pub fn fundamental_unit_coords(self) -> (BigInt, BigInt) {
        let d = BigInt::from(self.d);
        // θ = (p + √d) / q
        let (mut p, mut q) = if self.is_one_mod_four() {
            (BigInt::from(-1), BigInt::from(2))
        } else {
            (BigInt::zero(), BigInt::one())
        };
        let s = d.sqrt();
        let (mut h1, mut h2) = (BigInt::one(), BigInt::zero());
        let (mut k1, mut k2) = (BigInt::zero(), BigInt::one());
        loop {
            let a = floor_surd(&p, &s, &q);
            let h = &a * &h1 + &h2;
            let k = &a * &k1 + &k2;
            let n = self.basis_norm(&h, &k);
            if k.is_positive() && n.abs().is_one() {
                return (h, k);
            }
            h2 = std::mem::replace(&mut h1, h);
            k2 = std::mem::replace(&mut k1, k);
            p = &a * &q - &p;
            q = (&d - &p * &p) / &q;
        }
    }

    pub fn fundamental_unit(self) -> QuadNumber {
        let (x, y) = self.fundamental_unit_coords();
        self.from_basis(&x, &y)
    }
}

// floor((p + √D) / q) where s = floor(√D) and √D is irrational.
fn floor_surd(p: &BigInt, s: &BigInt, q: &BigInt) -> BigInt {
    if q.is_positive() {
        (p + s).div_floor(q)
    } else {
        let below: BigInt = (p + s).div_floor(&-q);
        -(below + BigInt::one())
    }
}

/// Exact element `x + y√d` of `ℚ(√d)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadNumber {
    d: u64,
    x: BigRational,
    y: BigRational,
}

impl QuadNumber {
    pub fn new(d: u64, x: BigRational, y: BigRational) -> Self {
        Self { d, x, y }
    }

    pub fn from_ints(d: u64, x: i64, y: i64) -> Self {
        Self { d, x: BigRational::from_integer(x.into()), y: BigRational::from_integer(y.into()) }
    }

    pub fn rational(d: u64, x: BigRational) -> Self {
        Self { d, x, y: BigRational::zero() }
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.x
    }

    pub fn surd_part(&self) -> &BigRational {
        &self.y
    }

    fn dd(&self) -> BigRational {
        BigRational::from_integer(BigInt::from(self.d))
    }

    pub fn add(&self, o: &Self) -> Self {
        debug_assert_eq!(self.d, o.d);
        Self { d: self.d, x: &self.x + &o.x, y: &self.y + &o.y }
    }

    pub fn sub(&self, o: &Self) -> Self {
        debug_assert_eq!(self.d, o.d);
        Self { d: self.d, x: &self.x - &o.x, y: &self.y - &o.y }
    }

    pub fn mul(&self, o: &Self) -> Self {
        debug_assert_eq!(self.d, o.d);
        Self {
            d: self.d,
            x: &self.x * &o.x + &self.y * &o.y * self.dd(),
            y: &self.x * &o.y + &self.y * &o.x,
        }
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Self { d: self.d, x: &self.x * r, y: &self.y * r }
    }

    pub fn conj(&self) -> Self {
        Self { d: self.d, x: self.x.clone(), y: -&self.y }
    }

    pub fn norm(&self) -> BigRational {
        &self.x * &self.x - &self.y * &self.y * self.dd()
    }

    pub fn trace(&self) -> BigRational {
        &self.x + &self.x
    }

    /// `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        let n = self.norm();
        if n.is_zero() {
            return None;
        }
        Some(self.conj().scale(&n.recip()))
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.x.is_one() && self.y.is_zero()
    }

    /// Membership in the ring of integers.
    pub fn is_integral(&self) -> bool {
        let two = BigRational::from_integer(BigInt::from(2));
        let (x2, y2) = (&self.x * &two, &self.y * &two);
        if !x2.is_integer() || !y2.is_integer() {
            return false;
        }
        if self.x.is_integer() && self.y.is_integer() {
            return true;
        }
        // half-integers allowed only for d ≡ 1 (mod 4), and then together
        self.d % 4 == 1 && !self.x.is_integer() && !self.y.is_integer()
    }

    pub fn is_unit(&self) -> bool {
        self.is_integral() && self.norm().abs().is_one()
    }

    pub fn to_f64(&self) -> f64 {
        let x = self.x.to_f64().unwrap_or(f64::NAN);
        let y = self.y.to_f64().unwrap_or(f64::NAN);
        x + y * (self.d as f64).sqrt()
    }
}

impl fmt::Display for QuadNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let den = self.x.denom().lcm(self.y.denom());
        let a = (&self.x * BigRational::from_integer(den.clone())).to_integer();
        let b = (&self.y * BigRational::from_integer(den.clone())).to_integer();
        let surd = match b.abs() {
            m if m.is_zero() => String::new(),
            m if m.is_one() => format!("sqrt{}", self.d),
            m => format!("{m}sqrt{}", self.d),
        };
        let body = match (a.is_zero(), b.is_zero()) {
            (_, true) => a.to_string(),
            (true, false) => format!("{}{surd}", if b.is_negative() { "-" } else { "" }),
            (false, false) => format!("{a}{}{surd}", if b.is_negative() { "-" } else { "+" }),
        };
        if den.is_one() {
            write!(f, "{body}")
        } else if a.is_zero() || b.is_zero() {
            write!(f, "{body}/{den}")
        } else {
            write!(f, "({body})/{den}")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half(n: i64) -> BigRational {
        BigRational::new(n.into(), 2.into())
    }

    #[test]
    fn field_validation() {
        assert!(QuadField::new(5).is_ok());
        assert!(QuadField::new(8).is_err());
        assert!(QuadField::new(1).is_err());
        assert!(QuadField::new(0).is_err());
    }

    #[test]
    fn arithmetic_identities() {
        let phi = QuadNumber::new(5, half(1), half(1));
        assert_eq!(phi.norm(), BigRational::from_integer((-1).into()));
        let phi2 = phi.mul(&phi);
        assert_eq!(phi2, phi.add(&QuadNumber::from_ints(5, 1, 0)));
        assert!(phi.mul(&phi.inv().unwrap()).is_one());
        assert!(phi.is_unit());
        assert!(!QuadNumber::new(3, half(1), half(1)).is_integral());
        assert!(!QuadNumber::new(5, half(1), BigRational::one()).is_integral());
    }

    #[test]
    fn display_forms() {
        assert_eq!(QuadNumber::new(5, half(3), half(1)).to_string(), "(3+sqrt5)/2");
        assert_eq!(QuadNumber::from_ints(2, 3, 2).to_string(), "3+2sqrt2");
        assert_eq!(QuadNumber::from_ints(3, 2, -1).to_string(), "2-sqrt3");
        assert_eq!(QuadNumber::from_ints(7, 4, 0).to_string(), "4");
        assert_eq!(QuadNumber::new(13, BigRational::zero(), half(1)).to_string(), "sqrt13/2");
    }

    #[test]
    fn small_fundamental_units() {
        let u = QuadField::new(5).unwrap().fundamental_unit();
        assert_eq!(u, QuadNumber::new(5, half(1), half(1)));
        assert_eq!(QuadField::new(2).unwrap().fundamental_unit(), QuadNumber::from_ints(2, 1, 1));
        assert_eq!(QuadField::new(3).unwrap().fundamental_unit(), QuadNumber::from_ints(3, 2, 1));
        assert_eq!(QuadField::new(13).unwrap().fundamental_unit(), QuadNumber::new(13, half(3), half(1)));
        assert_eq!(QuadField::new(7).unwrap().fundamental_unit(), QuadNumber::from_ints(7, 8, 3));
    }
}
