//! Combinatorial Ricci flow on tangential circle-packing metrics.
//!
//! Each vertex carries a circle of radius `r_i = e^{u_i}` and each edge has
//! length `r_i + r_j`. The curvature at a vertex is the angle defect
//! `K_i = 2π − Σ θ`, and the flow `du_i/dt = c − K_i` is the gradient flow of
//! the (convex) Chow–Luo energy. For `c = 2πχ/V` it converges to the constant
//! curvature metric.

pub mod mesh;

use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use mesh::TriMesh;

/// Number of step halvings before a step is declared stiff.
pub const MAX_HALVINGS: u32 = 30;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error("invalid mesh: {0}")]
    Mesh(String),
    #[error("metric has {got} log-radii, mesh has {expected} vertices")]
    MetricSize { expected: usize, got: usize },
    #[error("degenerate triangle {triangle}: side lengths {lengths:?} violate the triangle inequality")]
    Degenerate { triangle: usize, lengths: [f64; 3] },
    #[error("non-finite log-radius at vertex {0}")]
    NonFinite(usize),
    #[error("target curvature {got} is not the compatible constant 2πχ/V = {expected}")]
    IncompatibleTarget { got: f64, expected: f64 },
    #[error("surface has χ = {0} > 0; flow requires χ <= 0")]
    PositiveEuler(i64),
    #[error("invalid step size {0}")]
    BadStep(f64),
    #[error("stiff configuration: step size underflow after {MAX_HALVINGS} halvings at step {step}")]
    Stiff { step: usize },
    #[error("no convergence within {} steps (max deviation {:.3e})", .trace.records.len().saturating_sub(1), .trace.last_deviation())]
    NotConverged { trace: FlowTrace },
    #[error("fiber {label}: {source}")]
    Fiber { label: u64, source: Box<FlowError> },
    #[error("fiber family is empty or has repeated labels")]
    BadFamily,
}

impl FlowError {
    /// Failures of the numerical scheme, as opposed to invalid input.
    pub fn is_numeric(&self) -> bool {
        match self {
            FlowError::Stiff { .. } | FlowError::NotConverged { .. } => true,
            FlowError::Fiber { source, .. } => source.is_numeric(),
            _ => false,
        }
    }
}

/// Log-radii `u_i`, one per vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CirclePackingMetric {
    pub u: Vec<f64>,
}

impl CirclePackingMetric {
    pub fn new(u: Vec<f64>) -> Self {
        Self { u }
    }

    /// All radii equal to 1.
    pub fn uniform(vertex_count: usize) -> Self {
        Self { u: vec![0.0; vertex_count] }
    }

    /// `u_i + δ_i` with `δ_i` uniform in `[−amplitude, amplitude]`, seeded.
    pub fn perturbed(&self, amplitude: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self { u: self.u.iter().map(|u| u + rng.gen_range(-amplitude..=amplitude)).collect() }
    }

    pub fn radii(&self) -> Vec<f64> {
        self.u.iter().map(|u| u.exp()).collect()
    }

    /// Max-norm distance between log-radii.
    pub fn distance(&self, other: &Self) -> f64 {
        self.u.iter().zip(&other.u).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// Edge lengths `r_i + r_j` of every triangle, in corner order.
    pub fn triangle_lengths(&self, mesh: &TriMesh) -> Result<Vec<[f64; 3]>, FlowError> {
        self.validate(mesh)?;
        let r = self.radii();
        mesh.triangles()
            .iter()
            .enumerate()
            .map(|(t, &[a, b, c])| {
                let l = [r[a] + r[b], r[b] + r[c], r[c] + r[a]];
                let ok = l.iter().all(|x| x.is_finite() && *x > 0.0)
                    && l[0] < l[1] + l[2]
                    && l[1] < l[0] + l[2]
                    && l[2] < l[0] + l[1];
                if ok {
                    Ok(l)
                } else {
                    Err(FlowError::Degenerate { triangle: t, lengths: l })
                }
            })
            .collect()
    }

    fn validate(&self, mesh: &TriMesh) -> Result<(), FlowError> {
        if self.u.len() != mesh.vertex_count() {
            return Err(FlowError::MetricSize { expected: mesh.vertex_count(), got: self.u.len() });
        }
        match self.u.iter().position(|u| !u.is_finite()) {
            Some(i) => Err(FlowError::NonFinite(i)),
            None => Ok(()),
        }
    }
}

// Inner angles of a triangle of three mutually tangent circles. With
// s = r1 + r2 + r3, tan(θ1/2) = sqrt(r2·r3 / (r1·s)).
fn corner_angles(r: [f64; 3]) -> [f64; 3] {
    let s = r[0] + r[1] + r[2];
    let half = |i: usize, j: usize, k: usize| 2.0 * (r[j] * r[k] / (r[i] * s)).sqrt().atan();
    [half(0, 1, 2), half(1, 2, 0), half(2, 0, 1)]
}

/// `K_i = 2π − Σ` incident corner angles.
pub fn discrete_curvature(mesh: &TriMesh, m: &CirclePackingMetric) -> Result<Vec<f64>, FlowError> {
    m.triangle_lengths(mesh)?;
    let r = m.radii();
    let mut k = vec![2.0 * PI; mesh.vertex_count()];
    for tri in mesh.triangles() {
        let ang = corner_angles([r[tri[0]], r[tri[1]], r[tri[2]]]);
        for (v, a) in tri.iter().zip(ang) {
            k[*v] -= a;
        }
    }
    Ok(k)
}

/// The constant `2πχ/V`.
pub fn compatible_curvature(mesh: &TriMesh) -> f64 {
    2.0 * PI * mesh.euler_characteristic() as f64 / mesh.vertex_count() as f64
}

/// Result of one accepted step.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub metric: CirclePackingMetric,
    pub curvature: Vec<f64>,
    /// Step size actually used after halvings.
    pub dt: f64,
}

/// `u_i ← u_i + dt·(c − K_i)`, with the mean of the increment removed so that
/// `Σ u_i` is preserved. The step is halved until every triangle inequality
/// holds for the new metric.
pub fn ricci_step(mesh: &TriMesh, m: &CirclePackingMetric, c: f64, dt: f64) -> Result<Step, FlowError> {
    let k = discrete_curvature(mesh, m)?;
    step_from(mesh, m, &k, c, dt, 0)
}

fn step_from(
    mesh: &TriMesh,
    m: &CirclePackingMetric,
    k: &[f64],
    c: f64,
    dt: f64,
    step: usize,
) -> Result<Step, FlowError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(FlowError::BadStep(dt));
    }
    let mut du: Vec<f64> = k.iter().map(|ki| c - ki).collect();
    let mean = du.iter().sum::<f64>() / du.len() as f64;
    du.iter_mut().for_each(|x| *x -= mean);
    let mut h = dt;
    for _ in 0..=MAX_HALVINGS {
        let next = CirclePackingMetric { u: m.u.iter().zip(&du).map(|(u, d)| u + h * d).collect() };
        if let Ok(curvature) = discrete_curvature(mesh, &next) {
            return Ok(Step { metric: next, curvature, dt: h });
        }
        h *= 0.5;
    }
    Err(FlowError::Stiff { step })
}

/// One line of a [`FlowTrace`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub step: usize,
    pub t: f64,
    /// `max_i |K_i − c|`.
    pub max_dev: f64,
    pub total_curv: f64,
    /// `½ Σ (K_i − c)²`.
    pub energy: f64,
    pub max_curv: f64,
    pub min_curv: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FlowTrace {
    pub records: Vec<TraceRecord>,
}

impl FlowTrace {
    fn push(&mut self, step: usize, t: f64, k: &[f64], c: f64) {
        let max_dev = k.iter().map(|x| (x - c).abs()).fold(0.0, f64::max);
        self.records.push(TraceRecord {
            step,
            t,
            max_dev,
            total_curv: k.iter().sum(),
            energy: 0.5 * k.iter().map(|x| (x - c) * (x - c)).sum::<f64>(),
            max_curv: k.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            min_curv: k.iter().copied().fold(f64::INFINITY, f64::min),
        });
    }

    pub fn last_deviation(&self) -> f64 {
        self.records.last().map_or(f64::NAN, |r| r.max_dev)
    }

    /// CSV with columns `step,t,max_dev,total_curv`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("step,t,max_dev,total_curv\n");
        for r in &self.records {
            let _ = writeln!(s, "{},{:e},{:e},{:e}", r.step, r.t, r.max_dev, r.total_curv);
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowConfig {
    pub tol: f64,
    pub max_steps: usize,
    pub dt: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self { tol: 1e-8, max_steps: 100_000, dt: 0.1 }
    }
}

/// Runs Euler steps until `max_i |K_i − c| < tol`.
///
/// `c` must equal `2πχ/V` (to relative precision `1e-12`), and the surface
/// must have `χ ≤ 0`. The torus (`χ = 0`, `c = 0`) is accepted as the flat
/// sanity case.
pub fn flow_to_convergence(
    mesh: &TriMesh,
    m: &CirclePackingMetric,
    c: f64,
    cfg: &FlowConfig,
) -> Result<(CirclePackingMetric, FlowTrace), FlowError> {
    let chi = mesh.euler_characteristic();
    if chi > 0 {
        return Err(FlowError::PositiveEuler(chi));
    }
    let expected = compatible_curvature(mesh);
    if !((c - expected).abs() <= 1e-12 * expected.abs().max(1.0)) {
        return Err(FlowError::IncompatibleTarget { got: c, expected });
    }
    if !(cfg.tol > 0.0) {
        return Err(FlowError::BadStep(cfg.tol));
    }
    let mut metric = m.clone();
    let mut k = discrete_curvature(mesh, &metric)?;
    let mut trace = FlowTrace::default();
    let mut t = 0.0;
    trace.push(0, t, &k, c);
    for step in 1..=cfg.max_steps {
        if trace.last_deviation() < cfg.tol {
            return Ok((metric, trace));
        }
        let s = step_from(mesh, &metric, &k, c, cfg.dt, step)?;
        t += s.dt;
        metric = s.metric;
        k = s.curvature;
        trace.push(step, t, &k, c);
    }
    if trace.last_deviation() < cfg.tol {
        return Ok((metric, trace));
    }
    Err(FlowError::NotConverged { trace })
}

/// Finitely many metrics on one mesh, labelled by residues mod `modulus`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiberFamily {
    pub modulus: u64,
    pub fibers: Vec<(u64, CirclePackingMetric)>,
}

impl FiberFamily {
    pub fn new(modulus: u64, mut fibers: Vec<(u64, CirclePackingMetric)>) -> Result<Self, FlowError> {
        fibers.sort_by_key(|(l, _)| *l);
        let distinct = fibers.windows(2).all(|w| w[0].0 != w[1].0);
        if modulus == 0 || fibers.is_empty() || !distinct || fibers.iter().any(|(l, _)| *l >= modulus) {
            return Err(FlowError::BadFamily);
        }
        Ok(Self { modulus, fibers })
    }

    /// Every residue mod `modulus` carrying the same metric.
    pub fn constant(modulus: u64, m: &CirclePackingMetric) -> Result<Self, FlowError> {
        Self::new(modulus, (0..modulus).map(|l| (l, m.clone())).collect())
    }

    /// Largest distance between fibers whose labels are cyclically adjacent
    /// among the labels present.
    pub fn transverse_modulus(&self) -> f64 {
        let n = self.fibers.len();
        if n < 2 {
            return 0.0;
        }
        (0..n).map(|i| self.fibers[i].1.distance(&self.fibers[(i + 1) % n].1)).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaminatedReport {
    pub family: FiberFamily,
    pub traces: Vec<(u64, FlowTrace)>,
    pub input_modulus: f64,
    pub output_modulus: f64,
    /// `output / input`, or `None` when the input modulus is zero.
    pub continuity_constant: Option<f64>,
    /// Fibers with bitwise-equal inputs produced bitwise-equal outputs.
    pub identical_inputs_agree: bool,
}

/// [`flow_to_convergence`] on each fiber, in parallel, with the same
/// schedule for every fiber.
pub fn laminated_flow(
    mesh: &TriMesh,
    fam: &FiberFamily,
    c: f64,
    cfg: &FlowConfig,
) -> Result<LaminatedReport, FlowError> {
    let results: Vec<_> = fam
        .fibers
        .par_iter()
        .map(|(label, m)| {
            flow_to_convergence(mesh, m, c, cfg)
                .map(|(out, trace)| (*label, out, trace))
                .map_err(|e| FlowError::Fiber { label: *label, source: Box::new(e) })
        })
        .collect();
    let mut outputs = Vec::with_capacity(results.len());
    let mut traces = Vec::with_capacity(results.len());
    for r in results {
        let (label, out, trace) = r?;
        outputs.push((label, out));
        traces.push((label, trace));
    }
    let family = FiberFamily { modulus: fam.modulus, fibers: outputs };
    let mut identical_inputs_agree = true;
    for i in 0..fam.fibers.len() {
        for j in i + 1..fam.fibers.len() {
            if fam.fibers[i].1 == fam.fibers[j].1 && family.fibers[i].1 != family.fibers[j].1 {
                identical_inputs_agree = false;
            }
        }
    }
    let input_modulus = fam.transverse_modulus();
    let output_modulus = family.transverse_modulus();
    Ok(LaminatedReport {
        continuity_constant: (input_modulus > 0.0).then(|| output_modulus / input_modulus),
        family,
        traces,
        input_modulus,
        output_modulus,
        identical_inputs_agree,
    })
}

/// Experimental: one Euler step of `∂u/∂t = e^{−u}(Δ₀u − K₀) + c` with `Δ₀`
/// the uniform graph Laplacian and `K₀` the background curvature. Intended
/// for the flat torus (`K₀ = 0`, `c = 0`).
pub fn background_step(mesh: &TriMesh, u: &[f64], k0: &[f64], c: f64, dt: f64) -> Result<Vec<f64>, FlowError> {
    let n = mesh.vertex_count();
    if u.len() != n || k0.len() != n {
        return Err(FlowError::MetricSize { expected: n, got: u.len().min(k0.len()) });
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(FlowError::BadStep(dt));
    }
    let nbrs = mesh.neighbors();
    Ok((0..n)
        .map(|i| {
            let lap: f64 = nbrs[i].iter().map(|&j| u[j] - u[i]).sum();
            u[i] + dt * ((-u[i]).exp() * (lap - k0[i]) + c)
        })
        .collect())
}
