//! Independent reference implementations used by the integration tests.
//!
//! Nothing here calls into the algorithms it is used to check; each oracle
//! works from the defining property by exhaustive search.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use solenoid_core::harmonic::{dirichlet_energy, DiscreteMap, LeafGraph};

// ---------------------------------------------------------------------------
// Subgroups of ℚ supported on {2, 3, 5}
// ---------------------------------------------------------------------------

pub const SMALL_PRIMES: [u64; 3] = [2, 3, 5];

/// Heights at 2, 3, 5; `None` is ∞. Every other prime has height 0.
pub type Heights = [Option<u32>; 3];

/// Stand-in for ∞ when building generators. Larger than any exponent of a
/// prime in a searched numerator or denominator plus the largest finite
/// height, so membership tests on truncated generators are exact.
pub const INF_TRUNC: i32 = 40;

/// `v_p(q) ≥ −h(p)` for p ∈ {2,3,5}; `q` given by its valuation vector (the
/// search only produces 5-smooth rationals).
fn member(v: [i32; 3], h: &Heights) -> bool {
    v.iter().zip(h).all(|(&vp, hp)| match hp {
        None => true,
        Some(e) => vp >= -(*e as i32),
    })
}

fn generator(h: &Heights) -> [i32; 3] {
    let mut g = [0; 3];
    for i in 0..3 {
        g[i] = -h[i].map_or(INF_TRUNC, |e| e as i32);
    }
    g
}

fn valuations(mut n: u64) -> Option<[i32; 3]> {
    let mut v = [0; 3];
    for (i, p) in SMALL_PRIMES.iter().enumerate() {
        while n % p == 0 {
            n /= p;
            v[i] += 1;
        }
    }
    (n == 1).then_some(v)
}

/// All scalings `q = ±a/b` with `1 ≤ a, b ≤ bound`, as valuation vectors.
///
/// Only 5-smooth `a`, `b` can map one of these groups onto another: a prime
/// `r ∉ {2,3,5}` dividing `a` (resp. `b`) puts `1/r` into `q⁻¹·G_b` (resp.
/// `q·G_a`) while both groups have height 0 at `r`. The sign never matters.
pub fn smooth_scalings(bound: u64) -> Vec<[i32; 3]> {
    let smooth: Vec<[i32; 3]> = (1..=bound).filter_map(valuations).collect();
    let mut out = HashSet::new();
    for a in &smooth {
        for b in &smooth {
            out.insert([a[0] - b[0], a[1] - b[1], a[2] - b[2]]);
        }
    }
    let mut v: Vec<_> = out.into_iter().collect();
    v.sort();
    v
}

/// Brute-force isomorphism test: some `q` in the search space has
/// `q·G_s ⊆ G_t` and `q⁻¹·G_t ⊆ G_s`, checked on generators.
pub fn scaling_oracle(s: &Heights, t: &Heights, scalings: &[[i32; 3]]) -> Option<[i32; 3]> {
    let (gs, gt) = (generator(s), generator(t));
    scalings.iter().copied().find(|q| {
        let fwd = [gs[0] + q[0], gs[1] + q[1], gs[2] + q[2]];
        let back = [gt[0] - q[0], gt[1] - q[1], gt[2] - q[2]];
        member(fwd, t) && member(back, s)
    })
}

/// Smallest search bound reaching every scaling between heights in
/// `{0,1,2,3}`: `2³·3³·5³`.
pub const SCALING_BOUND: u64 = 27_000;

/// All height functions on {2,3,5} with values in {0,1,2,3,∞}.
pub fn all_small_heights() -> Vec<Heights> {
    let vals = [Some(0), Some(1), Some(2), Some(3), None];
    let mut out = Vec::new();
    for a in vals {
        for b in vals {
            for c in vals {
                out.push([a, b, c]);
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// GL(2,ℤ) conjugacy
// ---------------------------------------------------------------------------

pub type M2 = [[i64; 2]; 2];

pub fn mul2(x: &M2, y: &M2) -> M2 {
    [
        [x[0][0] * y[0][0] + x[0][1] * y[1][0], x[0][0] * y[0][1] + x[0][1] * y[1][1]],
        [x[1][0] * y[0][0] + x[1][1] * y[1][0], x[1][0] * y[0][1] + x[1][1] * y[1][1]],
    ]
}

pub fn det2(x: &M2) -> i64 {
    x[0][0] * x[1][1] - x[0][1] * x[1][0]
}

/// Hyperbolic matrices of determinant 1 with entries in `[−b, b]`.
pub fn hyperbolic_box(b: i64) -> Vec<M2> {
    let mut out = Vec::new();
    for a in -b..=b {
        for bb in -b..=b {
            for c in -b..=b {
                for d in -b..=b {
                    if a * d - bb * c == 1 && (a + d).abs() > 2 {
                        out.push([[a, bb], [c, d]]);
                    }
                }
            }
        }
    }
    out
}

/// Every `P` with entries in `[−b, b]` and `det P = ±1`.
pub fn unimodular_box(b: i64) -> Vec<M2> {
    let mut out = Vec::new();
    for p in -b..=b {
        for q in -b..=b {
            for r in -b..=b {
                for s in -b..=b {
                    if (p * s - q * r).abs() == 1 {
                        out.push([[p, q], [r, s]]);
                    }
                }
            }
        }
    }
    out
}

/// `{ B : P·A = B·P }` over the given conjugators, i.e. `B = P·A·P⁻¹`.
pub fn conjugates(a: &M2, ps: &[M2]) -> HashSet<M2> {
    ps.iter()
        .map(|p| {
            let det = det2(p);
            let inv = [[p[1][1] * det, -p[0][1] * det], [-p[1][0] * det, p[0][0] * det]];
            mul2(&mul2(p, a), &inv)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Pell equations
// ---------------------------------------------------------------------------

fn isqrt(n: u128) -> u128 {
    let mut s = (n as f64).sqrt() as u128;
    while s * s > n {
        s -= 1;
    }
    while (s + 1) * (s + 1) <= n {
        s += 1;
    }
    s
}

fn is_square(n: u128) -> bool {
    let s = isqrt(n);
    s * s == n
}

/// Smallest `v` in `1..=limit` for which `d·v² ± k` is a square, with
/// `k = 4` when `d ≡ 1 (mod 4)` and `k = 1` otherwise. Returns `(u, v)` with
/// `u² − d·v² = ±k`; the fundamental unit is then `(u + v√d)/2` or `u + v√d`.
pub fn pell_minimal(d: u64, limit: u128) -> Option<(u128, u128)> {
    let k: u128 = if d % 4 == 1 { 4 } else { 1 };
    let d = d as u128;
    (1..=limit).find_map(|v| {
        let n = d * v * v;
        // the smaller solution is the smaller unit
        if is_square(n - k) {
            Some((isqrt(n - k), v))
        } else if is_square(n + k) {
            Some((isqrt(n + k), v))
        } else {
            None
        }
    })
}

/// `(a + b√d)/2` as the pair `(a, b)`.
pub type HalfInt = (BigInt, BigInt);

fn half_mul(d: u64, x: &HalfInt, y: &HalfInt) -> HalfInt {
    let d = BigInt::from(d);
    ((&x.0 * &y.0 + d * &x.1 * &y.1) / 2, (&x.0 * &y.1 + &x.1 * &y.0) / 2)
}

/// Some `η` with `η^k = ε` for `k ≥ 2`, if `ε > 1` is a proper power of a
/// unit of the ring of integers. Every unit `η > 1` of a real quadratic field
/// exceeds the golden ratio, which bounds `k`; the candidate `η` is recovered
/// from its trace `η ± 1/η`, which is a rational integer, and confirmed by
/// exact multiplication.
pub fn unit_root(d: u64, eps: &HalfInt) -> Option<(u32, HalfInt)> {
    let e = (eps.0.to_f64()? + eps.1.to_f64()? * (d as f64).sqrt()) / 2.0;
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    let kmax = (e.ln() / golden.ln()).ceil() as u32 + 1;
    for k in 2..=kmax {
        let eta = e.powf(1.0 / k as f64);
        for s in [1i64, -1] {
            let trace = (eta + s as f64 / eta).round() as i64;
            for a in trace - 1..=trace + 1 {
                // a² − d·b² = 4·norm with norm = s
                let disc = a as i128 * a as i128 - 4 * s as i128;
                if disc < 0 || disc % d as i128 != 0 {
                    continue;
                }
                let b2 = (disc / d as i128) as u128;
                if !is_square(b2) {
                    continue;
                }
                let b = isqrt(b2) as i128;
                if d % 4 != 1 && (a % 2 != 0 || b % 2 != 0) {
                    continue;
                }
                for b in [b, -b] {
                    let eta: HalfInt = (BigInt::from(a), BigInt::from(b));
                    let mut p = eta.clone();
                    for _ in 1..k {
                        p = half_mul(d, &p, &eta);
                    }
                    if &p == eps {
                        return Some((k, eta));
                    }
                }
            }
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Harmonic maps
// ---------------------------------------------------------------------------

pub fn c(x: f64, y: f64) -> Complex64 {
    Complex64::new(x, y)
}

/// Uniform point in the disk of the given Euclidean radius.
pub fn random_point(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    let r = radius * rng.gen::<f64>().sqrt();
    Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
}

/// Connected graph: random spanning tree plus `extra` random edges, weights
/// in `[0.5, 2]`, vertices `0..pins` pinned inside radius 0.8.
pub fn random_instance(n: usize, extra: usize, pins: usize, seed: u64) -> LeafGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        edges.push((u, v, rng.gen_range(0.5..2.0)));
    }
    for _ in 0..extra {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v {
            edges.push((u, v, rng.gen_range(0.5..2.0)));
        }
    }
    let pins: BTreeMap<usize, Complex64> = (0..pins).map(|v| (v, random_point(&mut rng, 0.8))).collect();
    LeafGraph::new(n, edges, pins).expect("generated graph is valid")
}

/// Pinned vertices at their pins, free vertices at random points.
pub fn random_map(g: &LeafGraph, seed: u64) -> DiscreteMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = (0..g.vertex_count())
        .map(|v| g.pins().get(&v).copied().unwrap_or_else(|| random_point(&mut rng, 0.9)))
        .collect();
    DiscreteMap::new(g, pts).expect("random map is valid")
}

/// Five-point central finite-difference gradient of the energy in the
/// Euclidean coordinates of each free vertex; truncation error `O(h⁴)`.
pub fn fd_gradient(g: &LeafGraph, f: &DiscreteMap, h: f64) -> Vec<Complex64> {
    (0..g.vertex_count())
        .map(|i| {
            if g.is_pinned(i) {
                return c(0.0, 0.0);
            }
            let part = |dir: Complex64| {
                let at = |k: f64| {
                    let mut p = f.clone();
                    p.points[i] = f.points[i] + dir * (k * h);
                    dirichlet_energy(g, &p)
                };
                (8.0 * (at(1.0) - at(-1.0)) - (at(2.0) - at(-2.0))) / (12.0 * h)
            };
            c(part(c(1.0, 0.0)), part(c(0.0, 1.0)))
        })
        .collect()
}

fn poincare_distance(z: Complex64, w: Complex64) -> f64 {
    // cosh d = 1 + 2|z − w|² / ((1 − |z|²)(1 − |w|²))
    let x = 1.0 + 2.0 * (z - w).norm_sqr() / ((1.0 - z.norm_sqr()) * (1.0 - w.norm_sqr()));
    x.acosh()
}

/// Minimizer of `½ Σ w_i d(x, p_i)²` over the disk by nested grid search:
/// a 201×201 grid over the square, then repeated 41×41 grids of ten times
/// finer spacing around the best point.
pub fn star_grid_oracle(pins: &[(Complex64, f64)]) -> Complex64 {
    let energy = |z: Complex64| -> f64 {
        if z.norm_sqr() >= 1.0 {
            return f64::INFINITY;
        }
        pins.iter().map(|&(p, w)| 0.5 * w * poincare_distance(z, p).powi(2)).sum()
    };
    let mut best = c(0.0, 0.0);
    let mut best_e = energy(best);
    let scan = |center: Complex64, half: f64, n: i32, best: &mut Complex64, best_e: &mut f64| {
        for i in -n..=n {
            for j in -n..=n {
                let z = center + c(i as f64, j as f64) * (half / n as f64);
                let e = energy(z);
                if e < *best_e {
                    *best_e = e;
                    *best = z;
                }
            }
        }
    };
    scan(c(0.0, 0.0), 1.0, 100, &mut best, &mut best_e);
    let mut half = 0.02;
    for _ in 0..6 {
        scan(best, half, 20, &mut best, &mut best_e);
        half /= 10.0;
    }
    best
}

// ---------------------------------------------------------------------------
// Integer factorisation for type oracles
// ---------------------------------------------------------------------------

/// Prime multiplicities by trial division.
pub fn trial_factor(mut n: u64) -> BTreeMap<u64, u32> {
    let mut out = BTreeMap::new();
    let mut p = 2;
    while p * p <= n {
        while n % p == 0 {
            *out.entry(p).or_insert(0) += 1;
            n /= p;
        }
        p += 1;
    }
    if n > 1 {
        *out.entry(n).or_insert(0) += 1;
    }
    out
}
