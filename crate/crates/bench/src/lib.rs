//! Deterministic inputs shared by the benchmarks.

use std::collections::BTreeMap;

use solenoid_core::harmonic::{Complex64, DiscreteMap, LeafGraph};
use solenoid_core::tower::IntMatrix;

/// Small linear congruential stream; benchmarks only need repeatable inputs.
pub struct Lcg(u64);

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Self(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        self.0 >> 11
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        lo + (self.next_u64() % (hi - lo + 1) as u64) as i64
    }

    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 42) as f64
    }
}

/// Square matrix with entries in `[-bound, bound]`.
pub fn random_matrix(n: usize, bound: i64, seed: u64) -> IntMatrix {
    let mut rng = Lcg::new(seed);
    let rows: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.int(-bound, bound)).collect()).collect();
    let refs: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
    IntMatrix::from_i64(&refs)
}

/// `side × side` grid whose boundary is pinned to points on a circle of radius 0.8.
pub fn pinned_grid(side: usize) -> (LeafGraph, DiscreteMap) {
    let id = |i: usize, j: usize| i * side + j;
    let mut edges = Vec::new();
    for i in 0..side {
        for j in 0..side {
            if i + 1 < side {
                edges.push((id(i, j), id(i + 1, j), 1.0));
            }
            if j + 1 < side {
                edges.push((id(i, j), id(i, j + 1), 1.0 + 0.5 * ((i + j) % 3) as f64));
            }
        }
    }
    let boundary: Vec<usize> = (0..side * side)
        .filter(|&v| v / side == 0 || v / side == side - 1 || v % side == 0 || v % side == side - 1)
        .collect();
    let pins: BTreeMap<usize, Complex64> = boundary
        .iter()
        .enumerate()
        .map(|(k, &v)| (v, Complex64::from_polar(0.8, 2.0 * std::f64::consts::PI * k as f64 / boundary.len() as f64)))
        .collect();
    let g = LeafGraph::new(side * side, edges, pins).expect("grid graph is valid");
    let f = g.initial_map(Complex64::new(0.1, -0.05)).expect("start point is inside the disk");
    (g, f)
}
