//! Discrete harmonic maps from a weighted graph into the hyperbolic plane.
//!
//! The energy of `f` is `E(f) = ½ Σ_e w_e d(f(u), f(v))²`. Its Riemannian
//! gradient at a free vertex is minus the tension `τ_i = Σ_j w_ij log_{f_i} f_j`,
//! and the heat flow moves every free vertex toward the weighted Karcher mean
//! of its neighbours. With at least one pinned vertex the energy is strictly
//! convex along geodesic homotopies, so the limit does not depend on the
//! starting map.

pub mod disk;

use std::collections::BTreeMap;

pub use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const CENTROID_TOL: f64 = 1e-12;
const CENTROID_MAX_ITER: usize = 1_000;
const MAX_BACKTRACK: u32 = 30;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarmonicError {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("vertex {vertex} is not strictly inside the unit disk")]
    OutsideDisk { vertex: usize },
    #[error("pinned vertex {vertex} is not at its prescribed point")]
    PinMoved { vertex: usize },
    #[error("map has {got} points, graph has {expected} vertices")]
    SizeMismatch { expected: usize, got: usize },
    #[error("step size {0} is outside (0, 1]")]
    BadStep(f64),
    #[error("at least one pinned vertex is required")]
    NoPins,
    #[error("centroid iteration at vertex {vertex} did not converge")]
    CentroidNotConverged { vertex: usize },
    #[error("no convergence within {steps} steps (last displacement {displacement:.3e})")]
    MaxSteps { steps: usize, displacement: f64 },
}

impl HarmonicError {
    pub fn is_numeric(&self) -> bool {
        matches!(self, HarmonicError::CentroidNotConverged { .. } | HarmonicError::MaxSteps { .. })
    }
}

/// Weighted graph with some vertices pinned to points of the disk.
#[derive(Debug, Clone, PartialEq)]
pub struct LeafGraph {
    vertex_count: usize,
    edges: Vec<(usize, usize, f64)>,
    pins: BTreeMap<usize, Complex64>,
    adjacency: Vec<Vec<(usize, f64)>>,
}

#[derive(Serialize, Deserialize)]
struct PinFile {
    vertex: usize,
    point: [f64; 2],
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    vertices: usize,
    edges: Vec<(usize, usize, f64)>,
    pins: Vec<PinFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    initial: Option<Vec<[f64; 2]>>,
}

impl LeafGraph {
    /// Requires positive finite weights, no self-loops, a connected graph,
    /// and pins strictly inside the disk. Parallel edges are merged by adding
    /// their weights.
    pub fn new(
        vertex_count: usize,
        edges: Vec<(usize, usize, f64)>,
        pins: BTreeMap<usize, Complex64>,
    ) -> Result<Self, HarmonicError> {
        if vertex_count == 0 {
            return Err(HarmonicError::InvalidGraph("no vertices".into()));
        }
        let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for &(u, v, w) in &edges {
            if u >= vertex_count || v >= vertex_count {
                return Err(HarmonicError::InvalidGraph(format!("edge ({u}, {v}) out of range")));
            }
            if u == v {
                return Err(HarmonicError::InvalidGraph(format!("self-loop at {u}")));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(HarmonicError::InvalidGraph(format!("edge ({u}, {v}) has weight {w}")));
            }
            *merged.entry((u.min(v), u.max(v))).or_insert(0.0) += w;
        }
        for (&v, p) in &pins {
            if v >= vertex_count {
                return Err(HarmonicError::InvalidGraph(format!("pin on missing vertex {v}")));
            }
            if !inside(*p) {
                return Err(HarmonicError::OutsideDisk { vertex: v });
            }
        }
        let edges: Vec<_> = merged.into_iter().map(|((u, v), w)| (u, v, w)).collect();
        let mut adjacency = vec![Vec::new(); vertex_count];
        for &(u, v, w) in &edges {
            adjacency[u].push((v, w));
            adjacency[v].push((u, w));
        }
        let mut seen = vec![false; vertex_count];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &(v, _) in &adjacency[u] {
                if !std::mem::replace(&mut seen[v], true) {
                    stack.push(v);
                }
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(HarmonicError::InvalidGraph(format!("vertex {v} is not connected to vertex 0")));
        }
        Ok(Self { vertex_count, edges, pins, adjacency })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn pins(&self) -> &BTreeMap<usize, Complex64> {
        &self.pins
    }

    pub fn is_pinned(&self, v: usize) -> bool {
        self.pins.contains_key(&v)
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adjacency[v]
    }

    /// Same graph with every pin moved by `g`.
    pub fn map_pins(&self, g: impl Fn(Complex64) -> Complex64) -> Result<Self, HarmonicError> {
        let pins = self.pins.iter().map(|(&v, &p)| (v, g(p))).collect();
        Self::new(self.vertex_count, self.edges.clone(), pins)
    }

    /// Map with pinned vertices at their pins and free vertices at `free`.
    pub fn initial_map(&self, free: Complex64) -> Result<DiscreteMap, HarmonicError> {
        let pts = (0..self.vertex_count).map(|v| self.pins.get(&v).copied().unwrap_or(free)).collect();
        DiscreteMap::new(self, pts)
    }

    /// Parses the JSON graph format, returning the optional initial map too.
    pub fn from_json(text: &str) -> Result<(Self, Option<DiscreteMap>), HarmonicError> {
        let f: GraphFile = serde_json::from_str(text).map_err(|e| HarmonicError::InvalidGraph(e.to_string()))?;
        let mut pins = BTreeMap::new();
        for p in &f.pins {
            if pins.insert(p.vertex, Complex64::new(p.point[0], p.point[1])).is_some() {
                return Err(HarmonicError::InvalidGraph(format!("vertex {} pinned twice", p.vertex)));
            }
        }
        let g = Self::new(f.vertices, f.edges, pins)?;
        let init = match f.initial {
            Some(pts) => Some(DiscreteMap::new(&g, pts.iter().map(|p| Complex64::new(p[0], p[1])).collect())?),
            None => None,
        };
        Ok((g, init))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let f = GraphFile {
            vertices: self.vertex_count,
            edges: self.edges.clone(),
            pins: self.pins.iter().map(|(&vertex, p)| PinFile { vertex, point: [p.re, p.im] }).collect(),
            initial: None,
        };
        serde_json::to_value(f).expect("graph serializes")
    }
}

fn inside(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite() && z.norm_sqr() < 1.0
}

/// One point of the disk per vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMap {
    #[serde(with = "points")]
    pub points: Vec<Complex64>,
}

mod points {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(p: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        p.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        Ok(Vec::<[f64; 2]>::deserialize(d)?.into_iter().map(|[x, y]| Complex64::new(x, y)).collect())
    }
}

impl DiscreteMap {
    /// Checks size, that pins are respected exactly, and that all points are
    /// inside the disk.
    pub fn new(g: &LeafGraph, points: Vec<Complex64>) -> Result<Self, HarmonicError> {
        let m = Self { points };
        m.validate(g)?;
        Ok(m)
    }

    pub fn validate(&self, g: &LeafGraph) -> Result<(), HarmonicError> {
        if self.points.len() != g.vertex_count {
            return Err(HarmonicError::SizeMismatch { expected: g.vertex_count, got: self.points.len() });
        }
        if let Some(v) = self.points.iter().position(|p| !inside(*p)) {
            return Err(HarmonicError::OutsideDisk { vertex: v });
        }
        match g.pins.iter().find(|(&v, &p)| self.points[v] != p) {
            Some((&vertex, _)) => Err(HarmonicError::PinMoved { vertex }),
            None => Ok(()),
        }
    }

    pub fn map(&self, g: impl Fn(Complex64) -> Complex64) -> Self {
        Self { points: self.points.iter().map(|&z| g(z)).collect() }
    }

    /// Largest hyperbolic distance between corresponding points.
    pub fn distance(&self, other: &Self) -> f64 {
        self.points.iter().zip(&other.points).map(|(&a, &b)| disk::distance(a, b)).fold(0.0, f64::max)
    }
}

/// `½ Σ_e w_e d(f(u), f(v))²`.
pub fn dirichlet_energy(g: &LeafGraph, f: &DiscreteMap) -> f64 {
    0.5 * g
        .edges
        .iter()
        .map(|&(u, v, w)| {
            let d = disk::distance(f.points[u], f.points[v]);
            w * d * d
        })
        .sum::<f64>()
}

/// `τ_i = Σ_j w_ij log_{f_i}(f_j)` at free vertices, zero at pins.
pub fn tension(g: &LeafGraph, f: &DiscreteMap) -> Vec<Complex64> {
    (0..g.vertex_count)
        .map(|i| {
            if g.is_pinned(i) {
                return Complex64::new(0.0, 0.0);
            }
            g.adjacency[i].iter().map(|&(j, w)| disk::log(f.points[i], f.points[j]) * w).sum()
        })
        .collect()
}

/// Euclidean gradient of the energy with respect to the free coordinates,
/// `−λ(f_i)²·τ_i`.
pub fn energy_gradient(g: &LeafGraph, f: &DiscreteMap) -> Vec<Complex64> {
    tension(g, f)
        .into_iter()
        .zip(&f.points)
        .map(|(t, &z)| {
            let l = disk::conformal_factor(z);
            -t * (l * l)
        })
        .collect()
}

/// Weighted Karcher mean, the minimizer of `½ Σ w_j d(m, y_j)²`, started at
/// `start`.
///
/// Newton's method in an orthonormal frame at `m`: the Hessian of `½ d(·, y)²`
/// is `1` along the geodesic to `y` and `d·coth d` across it, so it dominates
/// `Σ w_j` and a Newton step is never longer than the plain averaging step.
/// Steps are halved until the objective does not increase, judged by value or
/// by its slope along the step. Converged once a
/// step is shorter than [`CENTROID_TOL`] in hyperbolic length.
pub fn weighted_centroid(points: &[(Complex64, f64)], start: Complex64) -> Option<Complex64> {
    let total: f64 = points.iter().map(|p| p.1).sum();
    if points.is_empty() || !(total > 0.0) {
        return None;
    }
    let objective = |m: Complex64| points.iter().map(|&(y, w)| 0.5 * w * disk::distance(m, y).powi(2)).sum::<f64>();
    let mut m = start;
    let mut fm = objective(m);
    for _ in 0..CENTROID_MAX_ITER {
        let lambda = disk::conformal_factor(m);
        let (mut g, mut h) = (Complex64::new(0.0, 0.0), [[0.0f64; 2]; 2]);
        for &(y, w) in points {
            let o = disk::log(m, y) * lambda;
            g += o * w;
            let d = o.norm();
            let k = if d < 1e-8 { 1.0 + d * d / 3.0 } else { d / d.tanh() };
            let (ux, uy) = if d > 0.0 { (o.re / d, o.im / d) } else { (0.0, 0.0) };
            h[0][0] += w * (k + (1.0 - k) * ux * ux);
            h[1][1] += w * (k + (1.0 - k) * uy * uy);
            h[0][1] += w * (1.0 - k) * ux * uy;
        }
        let det = h[0][0] * h[1][1] - h[0][1] * h[0][1];
        let step = Complex64::new(
            (h[1][1] * g.re - h[0][1] * g.im) / det,
            (h[0][0] * g.im - h[0][1] * g.re) / det,
        );
        if !(step.re.is_finite() && step.im.is_finite()) {
            return None;
        }
        if step.norm() < CENTROID_TOL {
            return Some(m);
        }
        let mut t = 1.0;
        loop {
            let next = disk::exp(m, step * (t / lambda));
            let fnext = objective(next);
            // the objective is convex along the geodesic from m, so a
            // nonpositive slope at `next` also certifies descent
            let back = disk::log(next, m);
            let slope: f64 = points
                .iter()
                .map(|&(y, w)| {
                    let l = disk::log(next, y);
                    w * (l.re * back.re + l.im * back.im)
                })
                .sum();
            if fnext <= fm || slope <= 0.0 {
                let moved = disk::distance(m, next);
                m = next;
                fm = fnext;
                if moved < CENTROID_TOL {
                    return Some(m);
                }
                break;
            }
            t *= 0.5;
            if t < 1e-12 {
                // no descent available at this precision
                return Some(m);
            }
        }
    }
    None
}

/// An accepted heat step and the step fraction actually used.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatStep {
    pub map: DiscreteMap,
    pub dt: f64,
    pub energy: f64,
    /// Accepted on the slope test although the computed energy rose, i.e.
    /// the change is below the rounding error of the energy sum.
    pub by_slope: bool,
}

// Sign of d/dt E(f_t) at t = 1 for the homotopy moving every vertex along the
// geodesic from `f` to `g1`. E(f_t) is convex in t (distance between two
// geodesics in a CAT(0) target is convex), so a nonpositive slope at the end
// means the energy did not increase over the step. Unlike comparing energies,
// this stays reliable when the decrease is below rounding.
fn homotopy_slope(g: &LeafGraph, f: &DiscreteMap, g1: &DiscreteMap) -> f64 {
    let tau = tension(g, g1);
    (0..g.vertex_count)
        .map(|i| {
            let p = g1.points[i];
            let back = disk::log(p, f.points[i]);
            let lam = disk::conformal_factor(p);
            // velocity is −back; Euclidean gradient is −λ²τ
            lam * lam * (tau[i].re * back.re + tau[i].im * back.im)
        })
        .sum()
}

/// Jacobi step: every free vertex moves a fraction `dt` along the geodesic
/// toward the weighted centroid of its neighbours. The fraction is halved
/// until the energy does not increase, judged either by the energies
/// themselves or by the slope of the energy along the step; if no fraction
/// works the map is returned unchanged with `dt = 0`.
pub fn heat_step(g: &LeafGraph, f: &DiscreteMap, dt: f64) -> Result<HeatStep, HarmonicError> {
    if !(dt > 0.0 && dt <= 1.0) {
        return Err(HarmonicError::BadStep(dt));
    }
    f.validate(g)?;
    let targets: Vec<Option<Complex64>> = (0..g.vertex_count)
        .into_par_iter()
        .map(|i| {
            if g.is_pinned(i) {
                return Ok(None);
            }
            let nb: Vec<_> = g.adjacency[i].iter().map(|&(j, w)| (f.points[j], w)).collect();
            weighted_centroid(&nb, f.points[i]).map(Some).ok_or(HarmonicError::CentroidNotConverged { vertex: i })
        })
        .collect::<Result<_, _>>()?;
    let e0 = dirichlet_energy(g, f);
    let mut h = dt;
    for _ in 0..=MAX_BACKTRACK {
        let pts = f
            .points
            .iter()
            .zip(&targets)
            .map(|(&x, t)| t.map_or(x, |c| disk::geodesic(x, c, h)))
            .collect();
        let cand = DiscreteMap { points: pts };
        if cand.validate(g).is_err() {
            h *= 0.5;
            continue;
        }
        let e1 = dirichlet_energy(g, &cand);
        if e1 <= e0 {
            return Ok(HeatStep { map: cand, dt: h, energy: e1, by_slope: false });
        }
        if homotopy_slope(g, f, &cand) <= 0.0 {
            return Ok(HeatStep { map: cand, dt: h, energy: e1, by_slope: true });
        }
        h *= 0.5;
    }
    Ok(HeatStep { map: f.clone(), dt: 0.0, energy: e0, by_slope: false })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicRun {
    pub map: DiscreteMap,
    /// Energy before the first step and after every accepted step.
    pub energies: Vec<f64>,
    /// Steps `k` (energies `k → k+1`) accepted on the slope test.
    pub slope_steps: Vec<usize>,
    pub steps: usize,
    pub last_displacement: f64,
}

/// Heat steps of fraction `dt` until the largest per-step displacement is
/// below `tol` and, in addition, the energy gradient is below `10·tol` or the
/// steps have stopped shrinking over a two-step window (rounding noise). If
/// the very first step already qualifies the input map is returned as is.
pub fn flow_to_harmonic(
    g: &LeafGraph,
    f0: &DiscreteMap,
    tol: f64,
    max_steps: usize,
    dt: f64,
) -> Result<HarmonicRun, HarmonicError> {
    if g.pins.is_empty() {
        return Err(HarmonicError::NoPins);
    }
    f0.validate(g)?;
    let mut f = f0.clone();
    let mut energies = vec![dirichlet_energy(g, &f)];
    let mut displacement = f64::INFINITY;
    let mut recent = [f64::INFINITY; 2];
    let mut slope_steps = Vec::new();
    for step in 1..=max_steps {
        let s = heat_step(g, &f, dt)?;
        let two_back = recent[0];
        displacement = s.map.distance(&f);
        recent = [recent[1], displacement];
        if displacement < tol {
            let grad = energy_gradient(g, &f).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            // Jacobi steps shrink over every two-step window until they are
            // down to rounding noise
            let stalled = s.dt == 0.0 || displacement >= two_back;
            if grad < 10.0 * tol || stalled {
                return Ok(HarmonicRun { map: f, energies, slope_steps, steps: step - 1, last_displacement: displacement });
            }
        }
        if s.by_slope {
            slope_steps.push(energies.len() - 1);
        }
        energies.push(s.energy);
        f = s.map;
    }
    Err(HarmonicError::MaxSteps { steps: max_steps, displacement })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64, y: f64) -> Complex64 {
        Complex64::new(x, y)
    }

    fn path() -> LeafGraph {
        let pins = BTreeMap::from([(0, c(0.5, 0.1)), (2, c(-0.3, -0.6))]);
        LeafGraph::new(3, vec![(0, 1, 1.0), (1, 2, 1.0)], pins).unwrap()
    }

    #[test]
    fn energy_examples() {
        let g = path();
        let same = DiscreteMap { points: vec![c(0.2, 0.2); 3] };
        assert_eq!(dirichlet_energy(&g, &same), 0.0);
        let one = LeafGraph::new(2, vec![(0, 1, 1.0)], BTreeMap::new()).unwrap();
        let f = DiscreteMap { points: vec![c(0.0, 0.0), c(0.5, 0.0)] };
        let d = 2.0 * 0.5f64.atanh();
        assert!((dirichlet_energy(&one, &f) - d * d / 2.0).abs() < 1e-14);
    }

    #[test]
    fn energy_is_isometry_invariant() {
        let g = path();
        let f = g.initial_map(c(0.1, 0.3)).unwrap();
        let phi = |z| disk::automorphism(1.1, c(-0.4, 0.2), z);
        let (e0, e1) = (dirichlet_energy(&g, &f), dirichlet_energy(&g, &f.map(phi)));
        assert!((e0 - e1).abs() < 1e-12 * e0);
    }

    #[test]
    fn single_free_vertex_reaches_midpoint() {
        let g = path();
        let f = g.initial_map(c(0.7, -0.1)).unwrap();
        let s = heat_step(&g, &f, 1.0).unwrap();
        assert_eq!(s.dt, 1.0);
        let mid = disk::geodesic(c(0.5, 0.1), c(-0.3, -0.6), 0.5);
        assert!((s.map.points[1] - mid).norm() < 1e-11);
    }

    #[test]
    fn centroid_is_stationary() {
        let g = path();
        let mid = disk::geodesic(c(0.5, 0.1), c(-0.3, -0.6), 0.5);
        let f = DiscreteMap::new(&g, vec![c(0.5, 0.1), mid, c(-0.3, -0.6)]).unwrap();
        let s = heat_step(&g, &f, 1.0).unwrap();
        assert!((s.map.points[1] - mid).norm() < 1e-12);
        let run = flow_to_harmonic(&g, &f, 1e-10, 10, 1.0).unwrap();
        assert_eq!(run.steps, 0);
        assert_eq!(run.map, f);
    }

    #[test]
    fn invalid_inputs() {
        assert!(LeafGraph::new(3, vec![(0, 1, 1.0)], BTreeMap::new()).is_err());
        assert!(LeafGraph::new(2, vec![(0, 1, -1.0)], BTreeMap::new()).is_err());
        assert!(matches!(
            LeafGraph::new(2, vec![(0, 1, 1.0)], BTreeMap::from([(0, c(1.0, 0.0))])),
            Err(HarmonicError::OutsideDisk { vertex: 0 })
        ));
        let g = path();
        assert!(matches!(heat_step(&g, &g.initial_map(c(0.0, 0.0)).unwrap(), 1.5), Err(HarmonicError::BadStep(_))));
        let unpinned = LeafGraph::new(2, vec![(0, 1, 1.0)], BTreeMap::new()).unwrap();
        let f = unpinned.initial_map(c(0.0, 0.0)).unwrap();
        assert_eq!(flow_to_harmonic(&unpinned, &f, 1e-8, 10, 1.0).unwrap_err(), HarmonicError::NoPins);
    }

    #[test]
    fn json_roundtrip() {
        let g = path();
        let text = g.to_json().to_string();
        let (back, init) = LeafGraph::from_json(&text).unwrap();
        assert_eq!(back, g);
        assert!(init.is_none());
    }
}
