//! Truncated arithmetic in the profinite integers.
//!
//! An element of ẑ is represented by its images in `ℤ/m_1, …, ℤ/m_d` for a
//! chain `m_1 | m_2 | … | m_d`. Every statement made at depth `d` is an exact
//! statement about ẑ modulo `m_d`. The default chain is `m_k = k!`, which is
//! cofinal for divisibility, so every prime power is eventually captured.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_DEPTH: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProfiniteError {
    #[error("invalid modulus chain: {0}")]
    InvalidChain(String),
    #[error("operands live on different modulus chains")]
    ChainMismatch,
    #[error("insufficient depth: {prime}^{exponent} divides no modulus of the chain")]
    InsufficientDepth { prime: u64, exponent: u32 },
    #[error("residues are not compatible at level {level}")]
    Incompatible { level: usize },
    #[error("expected {expected} residues, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid cylinder: residue {residue} not in [0, {modulus})")]
    InvalidCylinder { modulus: BigInt, residue: BigInt },
    #[error("level {level} out of range 1..={depth}")]
    LevelOutOfRange { level: usize, depth: usize },
}

/// How a finite chain continues beyond its last stored level.
///
/// Only used when a chain is read as an infinite tower (odometer types).
/// Chains compare equal on their moduli alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainPattern {
    /// No known continuation.
    #[default]
    Explicit,
    /// `m_k = k!`.
    Factorial,
    /// `m_k = b^k`.
    Powers(u64),
}

/// Divisibility chain `m_1 | m_2 | … | m_d` of positive moduli.
#[derive(Debug, Clone)]
pub struct ModulusChain {
    moduli: Vec<BigInt>,
    pattern: ChainPattern,
}

impl PartialEq for ModulusChain {
    fn eq(&self, other: &Self) -> bool {
        self.moduli == other.moduli
    }
}

impl Eq for ModulusChain {}

impl ModulusChain {
    pub fn new(moduli: Vec<BigInt>) -> Result<Self, ProfiniteError> {
        if moduli.is_empty() {
            return Err(ProfiniteError::InvalidChain("chain is empty".into()));
        }
        for (k, m) in moduli.iter().enumerate() {
            if !m.is_positive() {
                return Err(ProfiniteError::InvalidChain(format!(
                    "modulus({}) = {m} is not positive",
                    k + 1
                )));
            }
        }
        for (k, w) in moduli.windows(2).enumerate() {
            if !w[1].is_multiple_of(&w[0]) {
                return Err(ProfiniteError::InvalidChain(format!(
                    "modulus({}) = {} does not divide modulus({}) = {}",
                    k + 1,
                    w[0],
                    k + 2,
                    w[1]
                )));
            }
        }
        Ok(Self { moduli, pattern: ChainPattern::Explicit })
    }

    pub fn from_u64(moduli: &[u64]) -> Result<Self, ProfiniteError> {
        Self::new(moduli.iter().map(|&m| BigInt::from(m)).collect())
    }

    /// `1!, 2!, …, depth!`.
    pub fn factorial(depth: usize) -> Result<Self, ProfiniteError> {
        if depth == 0 {
            return Err(ProfiniteError::InvalidChain("depth must be positive".into()));
        }
        let mut acc = BigInt::one();
        let moduli = (1..=depth)
            .map(|k| {
                acc *= k;
                acc.clone()
            })
            .collect();
        Ok(Self { moduli, pattern: ChainPattern::Factorial })
    }

    /// `b, b², …, b^depth`.
    pub fn powers(base: u64, depth: usize) -> Result<Self, ProfiniteError> {
        if depth == 0 || base < 2 {
            return Err(ProfiniteError::InvalidChain(
                "powers chain needs base >= 2 and positive depth".into(),
            ));
        }
        let b = BigInt::from(base);
        let mut acc = BigInt::one();
        let moduli = (0..depth)
            .map(|_| {
                acc *= &b;
                acc.clone()
            })
            .collect();
        Ok(Self { moduli, pattern: ChainPattern::Powers(base) })
    }

    pub fn depth(&self) -> usize {
        self.moduli.len()
    }

    pub fn moduli(&self) -> &[BigInt] {
        &self.moduli
    }

    pub fn pattern(&self) -> ChainPattern {
        self.pattern
    }

    /// Modulus at a 1-based level.
    pub fn modulus(&self, level: usize) -> Result<&BigInt, ProfiniteError> {
        self.check_level(level)?;
        Ok(&self.moduli[level - 1])
    }

    pub fn top(&self) -> &BigInt {
        self.moduli.last().expect("chain is nonempty")
    }

    pub(crate) fn check_level(&self, level: usize) -> Result<(), ProfiniteError> {
        if level == 0 || level > self.depth() {
            Err(ProfiniteError::LevelOutOfRange { level, depth: self.depth() })
        } else {
            Ok(())
        }
    }

    /// Successive ratios `m_{k+1} / m_k`, with `m_0 = 1`.
    pub fn ratios(&self) -> Vec<BigInt> {
        let mut prev = BigInt::one();
        self.moduli
            .iter()
            .map(|m| {
                let r = m / &prev;
                prev = m.clone();
                r
            })
            .collect()
    }
}

/// An element of ẑ truncated to a modulus chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfiniteInt {
    chain: ModulusChain,
    residues: Vec<BigInt>,
}

impl ProfiniteInt {
    pub fn from_residues(chain: ModulusChain, residues: Vec<BigInt>) -> Result<Self, ProfiniteError> {
        if residues.len() != chain.depth() {
            return Err(ProfiniteError::LengthMismatch { expected: chain.depth(), got: residues.len() });
        }
        for (k, (r, m)) in residues.iter().zip(&chain.moduli).enumerate() {
            if r.is_negative() || r >= m {
                return Err(ProfiniteError::Incompatible { level: k + 1 });
            }
        }
        let x = Self { chain, residues };
        x.check_compatible()?;
        Ok(x)
    }

    /// The canonical embedding of an integer.
    pub fn embed(a: &BigInt, chain: &ModulusChain) -> Self {
        let residues = chain.moduli.iter().map(|m| a.mod_floor(m)).collect();
        Self { chain: chain.clone(), residues }
    }

    pub fn embed_i64(a: i64, chain: &ModulusChain) -> Self {
        Self::embed(&BigInt::from(a), chain)
    }

    pub fn chain(&self) -> &ModulusChain {
        &self.chain
    }

    pub fn residues(&self) -> &[BigInt] {
        &self.residues
    }

    /// Residue at a 1-based level.
    pub fn project(&self, level: usize) -> Result<&BigInt, ProfiniteError> {
        self.chain.check_level(level)?;
        Ok(&self.residues[level - 1])
    }

    pub fn check_compatible(&self) -> Result<(), ProfiniteError> {
        for k in 1..self.residues.len() {
            let m = &self.chain.moduli[k - 1];
            if self.residues[k].mod_floor(m) != self.residues[k - 1] {
                return Err(ProfiniteError::Incompatible { level: k + 1 });
            }
        }
        Ok(())
    }

    pub fn is_compatible(&self) -> bool {
        self.check_compatible().is_ok()
    }

    fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(&BigInt, &BigInt) -> BigInt,
    ) -> Result<Self, ProfiniteError> {
        if self.chain != other.chain {
            return Err(ProfiniteError::ChainMismatch);
        }
        let residues = self
            .residues
            .iter()
            .zip(&other.residues)
            .zip(&self.chain.moduli)
            .map(|((a, b), m)| f(a, b).mod_floor(m))
            .collect();
        Ok(Self { chain: self.chain.clone(), residues })
    }

    pub fn add(&self, other: &Self) -> Result<Self, ProfiniteError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, ProfiniteError> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self, ProfiniteError> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn neg(&self) -> Self {
        let residues = self
            .residues
            .iter()
            .zip(&self.chain.moduli)
            .map(|(a, m)| (-a).mod_floor(m))
            .collect();
        Self { chain: self.chain.clone(), residues }
    }

    /// Image in `ℤ_p / p^e` under ẑ = ∏ ℤ_p. Any level whose modulus is
    /// divisible by `p^e` gives the same answer; the shallowest one is used.
    pub fn component_p(&self, p: u64, e: u32) -> Result<BigInt, ProfiniteError> {
        let pe = BigInt::from(p).pow(e);
        self.chain
            .moduli
            .iter()
            .position(|m| m.is_multiple_of(&pe))
            .map(|k| self.residues[k].mod_floor(&pe))
            .ok_or(ProfiniteError::InsufficientDepth { prime: p, exponent: e })
    }
}

#[derive(Serialize, Deserialize)]
struct ProfiniteIntRepr {
    #[serde(with = "crate::bigint_serde::vec")]
    moduli: Vec<BigInt>,
    #[serde(with = "crate::bigint_serde::vec")]
    residues: Vec<BigInt>,
}

impl Serialize for ProfiniteInt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ProfiniteIntRepr { moduli: self.chain.moduli.clone(), residues: self.residues.clone() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ProfiniteInt {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = ProfiniteIntRepr::deserialize(d)?;
        let chain = ModulusChain::new(repr.moduli).map_err(D::Error::custom)?;
        ProfiniteInt::from_residues(chain, repr.residues).map_err(D::Error::custom)
    }
}

impl fmt::Display for ProfiniteInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, (r, m)) in self.residues.iter().zip(&self.chain.moduli).enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{r} mod {m}")?;
        }
        write!(f, ")")
    }
}

/// The clopen set `{x ∈ ẑ : x ≡ residue (mod modulus)}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClopenCylinder {
    modulus: BigInt,
    residue: BigInt,
}

impl ClopenCylinder {
    pub fn new(modulus: BigInt, residue: BigInt) -> Result<Self, ProfiniteError> {
        if !modulus.is_positive() || residue.is_negative() || residue >= modulus {
            return Err(ProfiniteError::InvalidCylinder { modulus, residue });
        }
        Ok(Self { modulus, residue })
    }

    pub fn from_u64(modulus: u64, residue: u64) -> Result<Self, ProfiniteError> {
        Self::new(modulus.into(), residue.into())
    }

    pub fn modulus(&self) -> &BigInt {
        &self.modulus
    }

    pub fn residue(&self) -> &BigInt {
        &self.residue
    }

    /// Normalized Haar measure: every cylinder of modulus `n` has mass `1/n`.
    pub fn haar_measure(&self) -> BigRational {
        BigRational::new(BigInt::one(), self.modulus.clone())
    }

    /// Image under translation by `t`.
    pub fn translate(&self, t: &BigInt) -> Self {
        Self { modulus: self.modulus.clone(), residue: (&self.residue + t).mod_floor(&self.modulus) }
    }

    /// Membership of a truncated element; `None` when the modulus divides no
    /// level of the element's chain.
    pub fn contains(&self, x: &ProfiniteInt) -> Option<bool> {
        let k = x.chain.moduli.iter().position(|m| m.is_multiple_of(&self.modulus))?;
        Some(x.residues[k].mod_floor(&self.modulus) == self.residue)
    }

    /// The `n` cylinders of modulus `n`, which partition ẑ.
    pub fn partition(modulus: u64) -> Vec<Self> {
        (0..modulus).map(|r| Self { modulus: modulus.into(), residue: r.into() }).collect()
    }
}

/// Whether translation by `t` has a dense orbit, i.e. generates `ℤ/m_k` at
/// every level of the chain.
pub fn translation_orbit_is_dense(chain: &ModulusChain, t: &BigInt) -> bool {
    chain.moduli.iter().all(|m| t.gcd(m).is_one())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn embed_examples() {
        let chain = ModulusChain::from_u64(&[1, 2, 6, 24]).unwrap();
        assert_eq!(ProfiniteInt::embed_i64(7, &chain).residues(), big(&[0, 1, 1, 7]).as_slice());
        assert!(ProfiniteInt::embed_i64(0, &chain).residues().iter().all(num_traits::Zero::is_zero));
        let short = ModulusChain::from_u64(&[1, 2, 6]).unwrap();
        assert_eq!(ProfiniteInt::embed_i64(-1, &short).residues(), big(&[0, 1, 5]).as_slice());
    }

    #[test]
    fn factorial_chain_matches_explicit() {
        let f = ModulusChain::factorial(4).unwrap();
        assert_eq!(f, ModulusChain::from_u64(&[1, 2, 6, 24]).unwrap());
        assert_eq!(f.pattern(), ChainPattern::Factorial);
        assert_eq!(ModulusChain::factorial(12).unwrap().top(), &BigInt::from(479_001_600u64));
    }

    #[test]
    fn invalid_chains_rejected() {
        assert!(ModulusChain::from_u64(&[2, 3]).is_err());
        assert!(ModulusChain::from_u64(&[]).is_err());
        assert!(ModulusChain::new(big(&[0, 2])).is_err());
        assert!(ModulusChain::factorial(0).is_err());
    }

    #[test]
    fn ring_examples() {
        let c = ModulusChain::factorial(6).unwrap();
        let e = |a| ProfiniteInt::embed_i64(a, &c);
        assert_eq!(e(3).add(&e(4)).unwrap(), e(7));
        assert_eq!(e(2).mul(&e(3)).unwrap(), e(6));
        assert_eq!(e(10).sub(&e(15)).unwrap(), e(-5));
        assert_eq!(e(9).neg(), e(-9));
    }

    #[test]
    fn chain_mismatch_is_an_error() {
        let a = ProfiniteInt::embed_i64(1, &ModulusChain::factorial(3).unwrap());
        let b = ProfiniteInt::embed_i64(1, &ModulusChain::powers(2, 3).unwrap());
        assert_eq!(a.add(&b), Err(ProfiniteError::ChainMismatch));
        assert_eq!(a.mul(&b), Err(ProfiniteError::ChainMismatch));
    }

    #[test]
    fn component_examples() {
        let chain = ModulusChain::from_u64(&[1, 2, 6, 24]).unwrap();
        let x = ProfiniteInt::embed_i64(10, &chain);
        assert_eq!(x.component_p(2, 2).unwrap(), BigInt::from(2));
        assert_eq!(x.component_p(3, 1).unwrap(), BigInt::from(1));
        assert_eq!(
            x.component_p(5, 2),
            Err(ProfiniteError::InsufficientDepth { prime: 5, exponent: 2 })
        );
    }

    #[test]
    fn incompatible_residues_rejected() {
        let chain = ModulusChain::from_u64(&[2, 4]).unwrap();
        assert!(ProfiniteInt::from_residues(chain.clone(), big(&[1, 2])).is_err());
        assert!(ProfiniteInt::from_residues(chain.clone(), big(&[1, 3])).is_ok());
        assert!(ProfiniteInt::from_residues(chain, big(&[1])).is_err());
    }

    #[test]
    fn haar_examples() {
        let c = ClopenCylinder::from_u64(6, 4).unwrap();
        assert_eq!(c.haar_measure(), BigRational::new(1.into(), 6.into()));
        assert_eq!(ClopenCylinder::from_u64(1, 0).unwrap().haar_measure(), BigRational::one());
        let total: BigRational = ClopenCylinder::partition(12).iter().map(|c| c.haar_measure()).sum();
        assert_eq!(total, BigRational::one());
        assert!(ClopenCylinder::from_u64(6, 6).is_err());
    }

    #[test]
    fn cylinder_membership() {
        let chain = ModulusChain::factorial(4).unwrap();
        let x = ProfiniteInt::embed_i64(17, &chain);
        assert_eq!(ClopenCylinder::from_u64(6, 5).unwrap().contains(&x), Some(true));
        assert_eq!(ClopenCylinder::from_u64(8, 1).unwrap().contains(&x), Some(true));
        assert_eq!(ClopenCylinder::from_u64(5, 2).unwrap().contains(&x), None);
    }

    #[test]
    fn density_examples() {
        let chain = ModulusChain::from_u64(&[2, 4, 8]).unwrap();
        assert!(translation_orbit_is_dense(&ModulusChain::factorial(8).unwrap(), &BigInt::one()));
        assert!(!translation_orbit_is_dense(&chain, &BigInt::from(2)));
        assert!(translation_orbit_is_dense(&chain, &BigInt::from(3)));
    }

    #[test]
    fn json_shape() {
        let chain = ModulusChain::from_u64(&[1, 2, 6]).unwrap();
        let x = ProfiniteInt::embed_i64(5, &chain);
        let v = serde_json::to_value(&x).unwrap();
        assert_eq!(v, serde_json::json!({"moduli": [1, 2, 6], "residues": [0, 1, 5]}));
        let bad = serde_json::json!({"moduli": [2, 4], "residues": [0, 1]});
        assert!(serde_json::from_value::<ProfiniteInt>(bad).is_err());
    }
}
