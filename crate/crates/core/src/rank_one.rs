//! Baer types of subgroups of ℚ and the one-dimensional solenoids they
//! classify.
//!
//! A subgroup `ℤ ⊆ G ⊆ ℚ` is described by a height function
//! `p ↦ t(p) ∈ ℕ ∪ {∞}` with `G = { q : v_p(q) ≥ −t(p) }`. Only finitely
//! described height functions are representable: a finite list of exceptions
//! on top of a default of `0` or `∞`. Two such groups are isomorphic exactly
//! when they agree on which primes are infinite (finite discrepancies are
//! absorbed by scaling with a rational), so [`BaerType::isomorphic`] reduces to
//! comparing infinite sets.
//!
//! Inverse limits of circles under `z ↦ z^{n_k}` are Pontryagin dual to the
//! group generated by the `1/(n_1⋯n_k)`, which gives the dictionary
//! [`type_from_tower`] / [`tower_from_type`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::arith::{factor, is_prime};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("all-zero type: the dual group is ℤ and the inverse limit is a circle, not a solenoid")]
    NotASolenoid,
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("prime {0} listed twice")]
    DuplicatePrime(u64),
    #[error("tower degree {0} is smaller than 2")]
    InvalidDegree(u64),
    #[error("tower has no degrees")]
    EmptyTower,
    #[error("periodic block start {start} is out of range for {len} degrees")]
    BadPeriod { start: usize, len: usize },
    #[error("cannot shift a finite tower of depth 1")]
    ShiftExhausted,
}

/// Height of a single prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Exponent {
    Finite(u32),
    Infinite,
}

impl Exponent {
    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinite)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(e) => write!(f, "{e}"),
            Exponent::Infinite => write!(f, "∞"),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(e) => s.serialize_u32(*e),
            Exponent::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u32),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(e) => Ok(Exponent::Finite(e)),
            Raw::Text(s) if s == "inf" => Ok(Exponent::Infinite),
            Raw::Text(s) => Err(D::Error::custom(format!("expected exponent or \"inf\", got {s:?}"))),
        }
    }
}

/// Height assigned to every prime not listed explicitly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum DefaultExponent {
    #[default]
    Zero,
    Infinite,
}

impl DefaultExponent {
    fn as_exponent(self) -> Exponent {
        match self {
            DefaultExponent::Zero => Exponent::Finite(0),
            DefaultExponent::Infinite => Exponent::Infinite,
        }
    }
}

impl Serialize for DefaultExponent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.as_exponent().serialize(s)
    }
}

impl<'de> Deserialize<'de> for DefaultExponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match Exponent::deserialize(d)? {
            Exponent::Finite(0) => Ok(DefaultExponent::Zero),
            Exponent::Infinite => Ok(DefaultExponent::Infinite),
            Exponent::Finite(e) => Err(D::Error::custom(format!("default exponent must be 0 or \"inf\", got {e}"))),
        }
    }
}

/// Finitely described height function in canonical form: listed primes are
/// distinct, ascending, and differ from the default.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct BaerType {
    entries: Vec<(u64, Exponent)>,
    default: DefaultExponent,
}

impl<'de> Deserialize<'de> for BaerType {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            #[serde(default)]
            entries: Vec<(u64, Exponent)>,
            #[serde(default)]
            default: DefaultExponent,
        }
        let raw = Raw::deserialize(d)?;
        BaerType::new(raw.entries, raw.default).map_err(D::Error::custom)
    }
}

impl BaerType {
    pub fn new(mut entries: Vec<(u64, Exponent)>, default: DefaultExponent) -> Result<Self, TypeError> {
        entries.sort_by_key(|&(p, _)| p);
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(TypeError::DuplicatePrime(w[0].0));
            }
        }
        if let Some(&(p, _)) = entries.iter().find(|&&(p, _)| !is_prime(p)) {
            return Err(TypeError::NotPrime(p));
        }
        entries.retain(|&(_, e)| e != default.as_exponent());
        Ok(Self { entries, default })
    }

    /// The type of ℤ.
    pub fn zero() -> Self {
        Self { entries: Vec::new(), default: DefaultExponent::Zero }
    }

    /// The type of ℚ, dual to the universal solenoid.
    pub fn full() -> Self {
        Self { entries: Vec::new(), default: DefaultExponent::Infinite }
    }

    /// Type with the given primes at height ∞ and everything else at 0.
    pub fn infinite_at(primes: &[u64]) -> Result<Self, TypeError> {
        Self::new(primes.iter().map(|&p| (p, Exponent::Infinite)).collect(), DefaultExponent::Zero)
    }

    pub fn entries(&self) -> &[(u64, Exponent)] {
        &self.entries
    }

    pub fn default_exponent(&self) -> DefaultExponent {
        self.default
    }

    pub fn exponent(&self, p: u64) -> Exponent {
        self.entries
            .binary_search_by_key(&p, |&(q, _)| q)
            .map(|i| self.entries[i].1)
            .unwrap_or(self.default.as_exponent())
    }

    pub fn is_zero(&self) -> bool {
        self.default == DefaultExponent::Zero && self.entries.is_empty()
    }

    /// A subgroup of ℚ containing ℤ is either infinite cyclic or dense; it is
    /// dense exactly when some prime has infinite height.
    pub fn is_dense_in_q(&self) -> bool {
        self.default == DefaultExponent::Infinite || self.entries.iter().any(|&(_, e)| e.is_infinite())
    }

    /// Primes where the height is ∞ (default `0`) or finite (default `∞`):
    /// the finitely many primes that carry the isomorphism class.
    fn exceptional_primes(&self) -> BTreeSet<u64> {
        match self.default {
            DefaultExponent::Zero => {
                self.entries.iter().filter(|(_, e)| e.is_infinite()).map(|&(p, _)| p).collect()
            }
            DefaultExponent::Infinite => self.entries.iter().map(|&(p, _)| p).collect(),
        }
    }

    /// Isomorphism of the corresponding subgroups of ℚ (equivalently of the
    /// dual solenoids).
    pub fn isomorphic(&self, other: &Self) -> bool {
        self.default == other.default && self.exceptional_primes() == other.exceptional_primes()
    }
}

impl fmt::Display for BaerType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (p, e)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}↦{e}")?;
        }
        if !self.entries.is_empty() {
            write!(f, ", ")?;
        }
        write!(f, "else {}}}", self.default.as_exponent())
    }
}

/// `G = { q ∈ ℚ : v_p(q) ≥ −t(p) }`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalSubgroup {
    #[serde(rename = "type")]
    pub ty: BaerType,
}

impl RationalSubgroup {
    pub fn new(ty: BaerType) -> Self {
        Self { ty }
    }

    pub fn contains(&self, q: &BigRational) -> bool {
        let mut den = q.denom().abs();
        match self.ty.default {
            DefaultExponent::Zero => {
                for &(p, e) in &self.ty.entries {
                    let p = BigInt::from(p);
                    let mut budget = match e {
                        Exponent::Finite(e) => Some(e),
                        Exponent::Infinite => None,
                    };
                    while budget != Some(0) && den.is_multiple_of(&p) {
                        den /= &p;
                        budget = budget.map(|b| b - 1);
                    }
                }
                den.is_one()
            }
            DefaultExponent::Infinite => self.ty.entries.iter().all(|&(p, e)| {
                let Exponent::Finite(limit) = e else { return true };
                let p = BigInt::from(p);
                let mut v = 0u32;
                while v <= limit && den.is_multiple_of(&p) {
                    den /= &p;
                    v += 1;
                }
                v <= limit
            }),
        }
    }
}

/// Continuation of a one-dimensional covering tower past its stored degrees.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Tail {
    /// The tower ends after the stored degrees.
    Stop,
    /// `degrees[start..]` repeats forever.
    Periodic { start: usize },
    /// After the stored degrees, every prime outside `excluded` keeps
    /// appearing forever (e.g. the factorial tower `n_k = k + 1`).
    Cofinal { excluded: Vec<u64> },
}

/// Degree sequence `n_1, n_2, …` of the tower `z ↦ z^{n_k}` of circle covers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SolenoidTower1D {
    degrees: Vec<u64>,
    tail: Tail,
}

impl SolenoidTower1D {
    pub fn new(degrees: Vec<u64>, tail: Tail) -> Result<Self, TypeError> {
        if let Some(&d) = degrees.iter().find(|&&d| d < 2) {
            return Err(TypeError::InvalidDegree(d));
        }
        match &tail {
            Tail::Cofinal { excluded } => {
                if let Some(&p) = excluded.iter().find(|&&p| !is_prime(p)) {
                    return Err(TypeError::NotPrime(p));
                }
            }
            _ if degrees.is_empty() => return Err(TypeError::EmptyTower),
            Tail::Periodic { start } if *start >= degrees.len() => {
                return Err(TypeError::BadPeriod { start: *start, len: degrees.len() })
            }
            _ => {}
        }
        Ok(Self { degrees, tail })
    }

    /// Finite block, optionally repeated forever.
    pub fn with_repeat(degrees: Vec<u64>, repeat: bool) -> Result<Self, TypeError> {
        let tail = if repeat { Tail::Periodic { start: 0 } } else { Tail::Stop };
        Self::new(degrees, tail)
    }

    /// `n_k = k + 1`, the tower of the factorial chain.
    pub fn factorial() -> Self {
        Self { degrees: Vec::new(), tail: Tail::Cofinal { excluded: Vec::new() } }
    }

    pub fn degrees(&self) -> &[u64] {
        &self.degrees
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    pub fn repeats(&self) -> bool {
        !matches!(self.tail, Tail::Stop)
    }

    /// First `n` degrees of the (idealized) infinite sequence.
    pub fn unroll(&self, n: usize) -> Vec<u64> {
        let mut out: Vec<u64> = self.degrees.iter().copied().take(n).collect();
        match &self.tail {
            Tail::Stop => {}
            Tail::Periodic { start } => {
                let block = &self.degrees[*start..];
                out.extend(block.iter().cycle().take(n.saturating_sub(out.len())));
            }
            Tail::Cofinal { excluded } => {
                let mut k = 2u64;
                while out.len() < n {
                    let d: u64 = factor(k)
                        .into_iter()
                        .filter(|(p, _)| !excluded.contains(p))
                        .map(|(p, e)| p.pow(e))
                        .product();
                    if d >= 2 {
                        out.push(d);
                    }
                    k += 1;
                }
            }
        }
        out
    }

    /// Drop the first covering map. Periodic towers rotate their block.
    pub fn shift(&self) -> Result<Self, TypeError> {
        let mut degrees = self.degrees.clone();
        let tail = match &self.tail {
            Tail::Stop => {
                if degrees.len() < 2 {
                    return Err(TypeError::ShiftExhausted);
                }
                degrees.remove(0);
                Tail::Stop
            }
            Tail::Periodic { start: 0 } => {
                degrees.rotate_left(1);
                Tail::Periodic { start: 0 }
            }
            Tail::Periodic { start } => {
                degrees.remove(0);
                Tail::Periodic { start: start - 1 }
            }
            Tail::Cofinal { excluded } => {
                if !degrees.is_empty() {
                    degrees.remove(0);
                }
                Tail::Cofinal { excluded: excluded.clone() }
            }
        };
        Ok(Self { degrees, tail })
    }
}

fn multiplicities(degrees: &[u64]) -> BTreeMap<u64, u32> {
    let mut m = BTreeMap::new();
    for &d in degrees {
        for (p, e) in factor(d) {
            *m.entry(p).or_insert(0) += e;
        }
    }
    m
}

/// Type of the dual of the inverse limit: the exponent of `p` is its total
/// multiplicity across the degrees, ∞ for primes that recur forever.
pub fn type_from_tower(t: &SolenoidTower1D) -> BaerType {
    match &t.tail {
        Tail::Stop => {
            let entries = multiplicities(&t.degrees).into_iter().map(|(p, e)| (p, Exponent::Finite(e))).collect();
            BaerType::new(entries, DefaultExponent::Zero).expect("factor yields distinct primes")
        }
        Tail::Periodic { start } => {
            let recurring = multiplicities(&t.degrees[*start..]);
            let entries = multiplicities(&t.degrees)
                .into_iter()
                .map(|(p, e)| {
                    let e = if recurring.contains_key(&p) { Exponent::Infinite } else { Exponent::Finite(e) };
                    (p, e)
                })
                .collect();
            BaerType::new(entries, DefaultExponent::Zero).expect("factor yields distinct primes")
        }
        Tail::Cofinal { excluded } => {
            let mult = multiplicities(&t.degrees);
            let excluded: BTreeSet<u64> = excluded.iter().copied().collect();
            let entries = excluded
                .into_iter()
                .map(|p| (p, Exponent::Finite(mult.get(&p).copied().unwrap_or(0))))
                .collect();
            BaerType::new(entries, DefaultExponent::Infinite).expect("excluded primes validated")
        }
    }
}

/// Canonical tower realizing a type exactly: finite heights first (primes
/// ascending, each repeated), then the infinite primes as a periodic block.
pub fn tower_from_type(t: &BaerType) -> Result<SolenoidTower1D, TypeError> {
    if t.is_zero() {
        return Err(TypeError::NotASolenoid);
    }
    let mut degrees = Vec::new();
    for &(p, e) in &t.entries {
        if let Exponent::Finite(e) = e {
            degrees.extend(std::iter::repeat(p).take(e as usize));
        }
    }
    let tail = match t.default {
        DefaultExponent::Infinite => Tail::Cofinal { excluded: t.entries.iter().map(|&(p, _)| p).collect() },
        DefaultExponent::Zero => {
            let start = degrees.len();
            degrees.extend(t.entries.iter().filter(|(_, e)| e.is_infinite()).map(|&(p, _)| p));
            if degrees.len() > start {
                Tail::Periodic { start }
            } else {
                Tail::Stop
            }
        }
    };
    SolenoidTower1D::new(degrees, tail)
}

/// Whether `q·G` and `H` can coincide for some rational q is what
/// [`BaerType::isomorphic`] decides; this helper gives the scaling that
/// realizes an isomorphism when one exists and both types have default 0.
pub fn scaling_witness(a: &BaerType, b: &BaerType) -> Option<BigRational> {
    if !a.isomorphic(b) || a.default != DefaultExponent::Zero {
        return None;
    }
    // v_p(q) = t_a(p) − t_b(p) at primes where both heights are finite.
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    let primes: BTreeSet<u64> = a.entries.iter().chain(&b.entries).map(|&(p, _)| p).collect();
    for p in primes {
        if let (Exponent::Finite(x), Exponent::Finite(y)) = (a.exponent(p), b.exponent(p)) {
            let pb = BigInt::from(p);
            if x > y {
                num *= pb.pow(x - y);
            } else {
                den *= pb.pow(y - x);
            }
        }
    }
    Some(BigRational::new(num, den))
}
