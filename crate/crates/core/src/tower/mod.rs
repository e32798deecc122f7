//! Covering towers of the n-torus.
//!
//! A tower is a sequence of nonsingular integer matrices `A_1, A_2, …`; the
//! `k`-th cover corresponds to the sublattice `L_k = (A_1⋯A_k)·ℤⁿ` and its
//! deck group is `ℤⁿ / L_k`. The Pontryagin dual of the inverse limit is
//! `⋃_k (A_1⋯A_k)^{-T} ℤⁿ`.
//!
//! Classifying toral solenoids is not decidable from finite data in general,
//! so the negative answers here ([`DualMembership::NoUpTo`],
//! [`dominates`]) are only valid up to the depth that was examined.

mod intmat;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub use intmat::{reduce_mod_hermite, IntMatrix};

use crate::rank_one::{type_from_tower, BaerType, SolenoidTower1D};

/// Fibers with more cosets than this are not enumerated.
pub const MAX_FIBER_SIZE: u64 = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TowerError {
    #[error("tower has no matrices")]
    Empty,
    #[error("matrix {index} is not {n}x{n}")]
    Shape { index: usize, n: usize },
    #[error("matrix {index} is singular")]
    Singular { index: usize },
    #[error("no matrix has |det| >= 2, so the tower has no proper cover")]
    NoProperCover,
    #[error("vector has length {got}, tower dimension is {n}")]
    Dimension { got: usize, n: usize },
    #[error("level {level} exceeds the tower depth {depth}")]
    LevelOutOfRange { level: usize, depth: usize },
    #[error("cannot shift a finite tower of depth 1")]
    ShiftExhausted,
    #[error("towers have different dimensions {0} and {1}")]
    DimensionMismatch(usize, usize),
    #[error("fiber at level {level} has {size} cosets, above the enumeration limit")]
    FiberTooLarge { level: usize, size: BigInt },
}

/// Finite (or periodically continued) chain of toral endomorphisms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorusTower {
    n: usize,
    mats: Vec<IntMatrix>,
    repeat: bool,
}

#[derive(Serialize, Deserialize)]
struct TowerRepr {
    n: usize,
    #[serde(with = "crate::bigint_serde::matrix_list")]
    mats: Vec<Vec<Vec<BigInt>>>,
    #[serde(default)]
    repeat: bool,
}

impl Serialize for TorusTower {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        TowerRepr { n: self.n, mats: self.mats.iter().map(IntMatrix::to_rows).collect(), repeat: self.repeat }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TorusTower {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = TowerRepr::deserialize(d)?;
        let mats = repr
            .mats
            .into_iter()
            .enumerate()
            .map(|(index, rows)| IntMatrix::from_rows(rows).ok_or(TowerError::Shape { index, n: repr.n }))
            .collect::<Result<Vec<_>, _>>()
            .map_err(D::Error::custom)?;
        TorusTower::new(repr.n, mats, repr.repeat).map_err(D::Error::custom)
    }
}

/// Outcome of a bounded search for `q` in the dual group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DualMembership {
    /// `(A_1⋯A_k)ᵀ q` is integral for this least `k`.
    Yes(usize),
    /// No level up to the given depth works; not a proof of non-membership.
    NoUpTo(usize),
}

/// A coset of `L_k` in `ℤⁿ`, labelled by its Hermite-reduced representative.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiberElement {
    pub level: usize,
    pub rep: Vec<BigInt>,
}

/// Nested lattices `ℤⁿ = L_0 ⊇ L_1 ⊇ …`, stored as basis matrices together
/// with their Hermite forms.
#[derive(Debug, Clone)]
pub struct LatticeChain {
    bases: Vec<IntMatrix>,
    hermite: Vec<IntMatrix>,
}

impl LatticeChain {
    pub fn depth(&self) -> usize {
        self.bases.len() - 1
    }

    pub fn basis(&self, k: usize) -> &IntMatrix {
        &self.bases[k]
    }

    pub fn hermite(&self, k: usize) -> &IntMatrix {
        &self.hermite[k]
    }

    /// `[ℤⁿ : L_k]`.
    pub fn index(&self, k: usize) -> BigInt {
        self.hermite[k].det()
    }

    /// Whether `L_j` of `other` lies inside `L_k` of `self`.
    pub fn contains_level(&self, k: usize, other: &LatticeChain, j: usize) -> bool {
        let h = &self.hermite[k];
        let b = &other.bases[j];
        (0..b.cols()).all(|c| reduce_mod_hermite(h, &b.column(c)).iter().all(Zero::is_zero))
    }
}

impl TorusTower {
    pub fn new(n: usize, mats: Vec<IntMatrix>, repeat: bool) -> Result<Self, TowerError> {
        if mats.is_empty() {
            return Err(TowerError::Empty);
        }
        let mut proper = false;
        for (index, m) in mats.iter().enumerate() {
            if m.rows() != n || m.cols() != n {
                return Err(TowerError::Shape { index, n });
            }
            let det = m.det();
            if det.is_zero() {
                return Err(TowerError::Singular { index });
            }
            proper |= det.abs() >= BigInt::from(2);
        }
        if !proper {
            return Err(TowerError::NoProperCover);
        }
        Ok(Self { n, mats, repeat })
    }

    /// `A, A, A, …`.
    pub fn constant(m: IntMatrix) -> Result<Self, TowerError> {
        Self::new(m.rows(), vec![m], true)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn mats(&self) -> &[IntMatrix] {
        &self.mats
    }

    pub fn repeat(&self) -> bool {
        self.repeat
    }

    /// Number of available levels; `None` when the tower repeats forever.
    pub fn depth(&self) -> Option<usize> {
        (!self.repeat).then_some(self.mats.len())
    }

    fn check_level(&self, level: usize) -> Result<(), TowerError> {
        match self.depth() {
            Some(depth) if level > depth => Err(TowerError::LevelOutOfRange { level, depth }),
            _ => Ok(()),
        }
    }

    /// The bonding matrix `A_k` for a 1-based level.
    pub fn matrix(&self, level: usize) -> Option<&IntMatrix> {
        if level == 0 {
            return None;
        }
        if self.repeat {
            Some(&self.mats[(level - 1) % self.mats.len()])
        } else {
            self.mats.get(level - 1)
        }
    }

    /// Levels `0..=depth`, truncated to the tower's own depth when finite.
    pub fn lattice_chain(&self, depth: usize) -> LatticeChain {
        let depth = self.depth().map_or(depth, |d| d.min(depth));
        let mut bases = vec![IntMatrix::identity(self.n)];
        for k in 1..=depth {
            let next = bases[k - 1].mul(self.matrix(k).expect("level within depth"));
            bases.push(next);
        }
        let hermite = bases.iter().map(IntMatrix::column_hermite).collect();
        LatticeChain { bases, hermite }
    }

    pub fn product(&self, level: usize) -> Result<IntMatrix, TowerError> {
        self.check_level(level)?;
        let mut p = IntMatrix::identity(self.n);
        for k in 1..=level {
            p = p.mul(self.matrix(k).expect("level checked"));
        }
        Ok(p)
    }

    /// Least level at which `q` enters the dual group, searched up to
    /// `max_depth`.
    pub fn dual_membership(&self, q: &[BigRational], max_depth: usize) -> Result<DualMembership, TowerError> {
        if q.len() != self.n {
            return Err(TowerError::Dimension { got: q.len(), n: self.n });
        }
        let reachable = self.depth().map_or(max_depth, |d| d.min(max_depth));
        let mut pt = IntMatrix::identity(self.n);
        for k in 0..=reachable {
            if k > 0 {
                // (A_1⋯A_k)ᵀ = A_kᵀ (A_1⋯A_{k-1})ᵀ
                pt = self.matrix(k).expect("level within depth").transpose().mul(&pt);
            }
            let integral = (0..self.n).all(|i| {
                let s: BigRational = (0..self.n).map(|j| BigRational::from(pt[(i, j)].clone()) * &q[j]).sum();
                s.is_integer()
            });
            if integral {
                return Ok(DualMembership::Yes(k));
            }
        }
        Ok(DualMembership::NoUpTo(max_depth))
    }

    /// Invariant factors of the deck group `ℤⁿ / L_k`; empty at level 0.
    pub fn fiber_group(&self, level: usize) -> Result<Vec<BigInt>, TowerError> {
        if level == 0 {
            return Ok(Vec::new());
        }
        Ok(self.product(level)?.smith_diagonal())
    }

    fn level_hermite(&self, level: usize) -> Result<IntMatrix, TowerError> {
        Ok(self.product(level)?.column_hermite())
    }

    /// Canonical label of the coset `v + L_k`.
    pub fn fiber_element(&self, v: &[BigInt], level: usize) -> Result<FiberElement, TowerError> {
        if v.len() != self.n {
            return Err(TowerError::Dimension { got: v.len(), n: self.n });
        }
        let h = self.level_hermite(level)?;
        Ok(FiberElement { level, rep: reduce_mod_hermite(&h, v) })
    }

    /// All cosets of `L_k` in canonical (lexicographic) order.
    pub fn fiber_cosets(&self, level: usize) -> Result<Vec<FiberElement>, TowerError> {
        let h = self.level_hermite(level)?;
        let sides = box_sides(&h, level)?;
        let total: usize = sides.iter().product();
        let mut out = Vec::with_capacity(total);
        for idx in 0..total {
            let mut rem = idx;
            let mut rep = vec![BigInt::zero(); self.n];
            for i in (0..self.n).rev() {
                rep[i] = BigInt::from(rem % sides[i]);
                rem /= sides[i];
            }
            out.push(FiberElement { level, rep });
        }
        Ok(out)
    }

    /// Holonomy of a loop `γ ∈ ℤⁿ = π₁(Tⁿ)` on the fiber over the base point
    /// at level `k`: the translation `v ↦ v + γ` of `ℤⁿ / L_k`, returned as the
    /// permutation `perm[i] = j` of canonical coset indices.
    pub fn holonomy(&self, loop_class: &[BigInt], level: usize) -> Result<Vec<usize>, TowerError> {
        if loop_class.len() != self.n {
            return Err(TowerError::Dimension { got: loop_class.len(), n: self.n });
        }
        let h = self.level_hermite(level)?;
        let sides = box_sides(&h, level)?;
        let cosets = self.fiber_cosets(level)?;
        Ok(cosets
            .iter()
            .map(|c| {
                let moved: Vec<BigInt> = c.rep.iter().zip(loop_class).map(|(a, b)| a + b).collect();
                coset_index(&reduce_mod_hermite(&h, &moved), &sides)
            })
            .collect())
    }

    /// Index (in canonical order at level `k`) of the image of a level-`k+1`
    /// coset under the covering projection.
    pub fn project_coset(&self, e: &FiberElement) -> Result<FiberElement, TowerError> {
        if e.level == 0 {
            return Ok(e.clone());
        }
        self.fiber_element(&e.rep, e.level - 1)
    }

    pub fn coset_position(&self, e: &FiberElement) -> Result<usize, TowerError> {
        let h = self.level_hermite(e.level)?;
        let sides = box_sides(&h, e.level)?;
        Ok(coset_index(&e.rep, &sides))
    }

    /// Drop `A_1`. A periodic tower rotates its period instead.
    pub fn shift(&self) -> Result<Self, TowerError> {
        let mut mats = self.mats.clone();
        if self.repeat {
            mats.rotate_left(1);
        } else if mats.len() < 2 {
            return Err(TowerError::ShiftExhausted);
        } else {
            mats.remove(0);
        }
        // A finite tail may consist of automorphisms only; keep it anyway.
        Ok(Self { n: self.n, mats, repeat: self.repeat })
    }

    /// Coordinate types when every bonding matrix is diagonal.
    pub fn as_product_of_1d(&self) -> ProductSplit {
        if !self.mats.iter().all(IntMatrix::is_diagonal) {
            return ProductSplit::NotDiagonal;
        }
        let types = (0..self.n)
            .map(|i| {
                let degrees: Vec<u64> = self
                    .mats
                    .iter()
                    .filter_map(|m| m[(i, i)].abs().to_u64())
                    .filter(|&d| d >= 2)
                    .collect();
                if degrees.is_empty() {
                    BaerType::zero()
                } else {
                    let t = SolenoidTower1D::with_repeat(degrees, self.repeat).expect("degrees are >= 2");
                    type_from_tower(&t)
                }
            })
            .collect();
        ProductSplit::Types(types)
    }
}

/// Result of splitting a torus tower into circle towers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProductSplit {
    Types(Vec<BaerType>),
    NotDiagonal,
}

fn box_sides(h: &IntMatrix, level: usize) -> Result<Vec<usize>, TowerError> {
    let size = h.det();
    if size > BigInt::from(MAX_FIBER_SIZE) {
        return Err(TowerError::FiberTooLarge { level, size });
    }
    Ok((0..h.rows()).map(|i| h[(i, i)].to_usize().expect("bounded by fiber size")).collect())
}

fn coset_index(rep: &[BigInt], sides: &[usize]) -> usize {
    rep.iter()
        .zip(sides)
        .fold(0usize, |acc, (v, &s)| acc * s + v.to_usize().expect("reduced representative"))
}

/// Bounded check that `t2`'s lattice chain is cofinal in `t1`'s: every
/// `L¹_k` with `k ≤ depth` contains some `L²_j`. The search for `j` runs up to
/// `depth · max(depth, 2)` levels of `t2`, so towers whose degrees differ by
/// bounded powers are recognized; a `true` answer is only a statement about
/// the levels examined.
pub fn dominates(t1: &TorusTower, t2: &TorusTower, depth: usize) -> Result<bool, TowerError> {
    if t1.dim() != t2.dim() {
        return Err(TowerError::DimensionMismatch(t1.dim(), t2.dim()));
    }
    let j_max = depth * depth.max(2);
    let c1 = t1.lattice_chain(depth);
    let c2 = t2.lattice_chain(j_max);
    // containment is monotone in j, so a single forward sweep suffices
    let mut j = 0;
    for k in 0..=c1.depth() {
        while !c1.contains_level(k, &c2, j) {
            j += 1;
            if j > c2.depth() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Holonomy permutations compose like the loops they come from.
pub fn compose(p: &[usize], q: &[usize]) -> Vec<usize> {
    p.iter().map(|&i| q[i]).collect()
}

pub fn identity_perm(n: usize) -> Vec<usize> {
    (0..n).collect()
}

pub fn is_identity(p: &[usize]) -> bool {
    p.iter().enumerate().all(|(i, &j)| i == j)
}
