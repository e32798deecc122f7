//! One-dimensional solenoids as suspensions of odometers.
//!
//! The odometer on a chain `m_1 | m_2 | …` is `x ↦ x + 1` on the inverse limit
//! of the `ℤ/m_k`. It is the first-return map of the flow along the leaves to
//! the transversal Cantor fiber, and its suspension is dual to the subgroup
//! of ℚ generated by the `1/m_k`.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::profinite::{ChainPattern, ModulusChain, ProfiniteError, ProfiniteInt};
use crate::rank_one::{type_from_tower, BaerType, SolenoidTower1D, Tail};

/// Orbits longer than this are not walked step by step.
pub const MAX_ORBIT_WALK: u64 = 1 << 26;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Odometer {
    chain: ModulusChain,
}

impl Odometer {
    pub fn new(chain: ModulusChain) -> Self {
        Self { chain }
    }

    pub fn chain(&self) -> &ModulusChain {
        &self.chain
    }

    /// `x + 1` with carries, i.e. levelwise `+1 mod m_k`.
    pub fn first_return(&self, x: &ProfiniteInt) -> Result<ProfiniteInt, ProfiniteError> {
        x.add(&ProfiniteInt::embed(&BigInt::one(), &self.chain))
    }

    /// Walks the orbit of `0` for `m_k` steps and checks that every residue
    /// mod `m_k` is visited. Levels whose modulus exceeds
    /// [`MAX_ORBIT_WALK`] are rejected rather than walked.
    pub fn orbit_covers_level(&self, level: usize) -> Result<bool, ProfiniteError> {
        let m = self.chain.modulus(level)?;
        let Some(m) = m.to_u64().filter(|&m| m <= MAX_ORBIT_WALK) else {
            return Err(ProfiniteError::InvalidChain(format!(
                "modulus {m} at level {level} is too large to walk"
            )));
        };
        let mut seen = vec![false; m as usize];
        let mut x = 0u64;
        for _ in 0..m {
            seen[x as usize] = true;
            x = (x + 1) % m;
        }
        Ok(x == 0 && seen.into_iter().all(|s| s))
    }

    /// Degree sequence `n_k = m_k / m_{k-1}` with trivial ratios dropped.
    pub fn degrees(&self) -> Vec<u64> {
        self.chain
            .ratios()
            .into_iter()
            .filter(|r| !r.is_one() && !r.is_zero())
            .map(|r| r.to_u64().expect("chain ratios fit in u64"))
            .collect()
    }

    /// The tower of circle covers whose inverse limit is the suspension.
    pub fn tower(&self) -> Option<SolenoidTower1D> {
        let degrees = self.degrees();
        match self.chain.pattern() {
            ChainPattern::Factorial => Some(SolenoidTower1D::factorial()),
            ChainPattern::Powers(b) => SolenoidTower1D::with_repeat(vec![b], true).ok(),
            ChainPattern::Explicit => SolenoidTower1D::new(degrees, Tail::Stop).ok(),
        }
    }

    /// Baer type of the dual of the suspension. A finite explicit chain whose
    /// moduli are all 1 yields the zero type (the suspension is a circle).
    pub fn matches_dual_type(&self) -> BaerType {
        self.tower().map_or_else(BaerType::zero, |t| type_from_tower(&t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rank_one::Exponent;

    #[test]
    fn first_return_examples() {
        let chain = ModulusChain::from_u64(&[2, 4, 8]).unwrap();
        let o = Odometer::new(chain.clone());
        let max = ProfiniteInt::from_residues(chain.clone(), vec![1.into(), 3.into(), 7.into()]).unwrap();
        assert_eq!(o.first_return(&max).unwrap(), ProfiniteInt::embed_i64(0, &chain));
        assert_eq!(
            o.first_return(&ProfiniteInt::embed_i64(0, &chain)).unwrap(),
            ProfiniteInt::embed_i64(1, &chain)
        );
    }

    #[test]
    fn first_return_cycles_at_each_level() {
        let chain = ModulusChain::factorial(4).unwrap();
        let o = Odometer::new(chain.clone());
        let x0 = ProfiniteInt::embed_i64(5, &chain);
        for level in 1..=4 {
            let m = chain.modulus(level).unwrap().to_u64().unwrap();
            let mut x = x0.clone();
            for _ in 0..m {
                x = o.first_return(&x).unwrap();
            }
            assert_eq!(x.project(level).unwrap(), x0.project(level).unwrap());
        }
    }

    #[test]
    fn orbit_examples() {
        assert!(Odometer::new(ModulusChain::powers(2, 3).unwrap()).orbit_covers_level(3).unwrap());
        assert!(Odometer::new(ModulusChain::factorial(4).unwrap()).orbit_covers_level(4).unwrap());
        assert!(Odometer::new(ModulusChain::factorial(4).unwrap()).orbit_covers_level(1).unwrap());
        assert!(Odometer::new(ModulusChain::factorial(4).unwrap()).orbit_covers_level(5).is_err());
    }

    #[test]
    fn dual_type_examples() {
        let o = Odometer::new(ModulusChain::powers(2, 6).unwrap());
        assert_eq!(o.matches_dual_type(), BaerType::infinite_at(&[2]).unwrap());
        let o = Odometer::new(ModulusChain::factorial(8).unwrap());
        assert_eq!(o.matches_dual_type(), BaerType::full());
        let o = Odometer::new(ModulusChain::powers(6, 4).unwrap());
        assert_eq!(o.matches_dual_type(), BaerType::infinite_at(&[2, 3]).unwrap());
        let o = Odometer::new(ModulusChain::from_u64(&[2, 4, 8]).unwrap());
        assert_eq!(o.matches_dual_type().exponent(2), Exponent::Finite(3));
        let o = Odometer::new(ModulusChain::from_u64(&[1, 1]).unwrap());
        assert!(o.matches_dual_type().is_zero());
    }
}
