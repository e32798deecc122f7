//! One function per subcommand, each producing a [`Report`].

use std::path::PathBuf;

use clap::{ArgGroup, Args};
use num_traits::ToPrimitive;
use serde_json::{json, Value};
use solenoid_core::harmonic::{self, Complex64, HarmonicError, LeafGraph};
use solenoid_core::profinite::{translation_orbit_is_dense, ProfiniteError, ClopenCylinder, ProfiniteInt};
use solenoid_core::rank_one::{scaling_witness, TypeError, tower_from_type, type_from_tower};
use solenoid_core::ricci::{self, CirclePackingMetric, FiberFamily, FlowConfig, FlowError};
use solenoid_core::solv3::{self, HypMatrix, QuadField, Solv3Error};
use solenoid_core::suspension::{Odometer, MAX_ORBIT_WALK};
use solenoid_core::tower::{self, TorusTower, TowerError};
use solenoid_core::{BaerType, BigInt, Error, ErrorKind, RationalSubgroup, Report, SolenoidTower1D};

use crate::input;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureKind {
    Precondition,
    Numeric,
}

#[derive(Debug, Clone)]
pub struct Failure {
    pub kind: FailureKind,
    pub message: String,
}

impl Failure {
    pub fn precondition(message: impl Into<String>) -> Self {
        Self { kind: FailureKind::Precondition, message: message.into() }
    }

    pub fn numeric(message: impl Into<String>) -> Self {
        Self { kind: FailureKind::Numeric, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e.kind() {
            ErrorKind::Precondition => Failure::precondition(e.to_string()),
            ErrorKind::Numeric => Failure::numeric(e.to_string()),
        }
    }
}

macro_rules! via_core_error {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                Error::from(e).into()
            }
        }
    )*};
}

via_core_error!(ProfiniteError, TypeError, TowerError, Solv3Error, FlowError, HarmonicError);

type Outcome = Result<Report, Failure>;

/// Integers as JSON numbers when they fit in 64 bits, decimal strings otherwise.
fn int(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(v) => json!(v),
        None => json!(n.to_string()),
    }
}

fn parse_type(text: &str) -> Result<BaerType, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::precondition(format!("bad type {text:?}: {e}")))
}

fn matrix(s: &str) -> Result<HypMatrix, Failure> {
    Ok(s.parse::<HypMatrix>()?)
}

// ---------------------------------------------------------------- profinite

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("action").required(true).multiple(true)
    .args(["haar", "embed", "add", "mul", "sub", "dense"])))]
pub struct ProfiniteArgs {
    /// Haar measure of the cylinder {x : x ≡ R mod N}.
    #[arg(long, num_args = 2, value_names = ["N", "R"], allow_negative_numbers = true)]
    pub haar: Option<Vec<String>>,
    /// Embed an integer into the truncated profinite integers.
    #[arg(long, value_name = "A", allow_negative_numbers = true)]
    pub embed: Option<String>,
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true)]
    pub add: Option<Vec<String>>,
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true)]
    pub mul: Option<Vec<String>>,
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true)]
    pub sub: Option<Vec<String>>,
    /// Whether the orbit of translation by T is dense at every level.
    #[arg(long, value_name = "T", allow_negative_numbers = true)]
    pub dense: Option<String>,
    /// `factorial`, `powers:B` or `m1,m2,...`.
    #[arg(long, default_value = "factorial")]
    pub chain: String,
    #[arg(long)]
    pub depth: Option<usize>,
}

fn pair(v: &[String]) -> Result<(BigInt, BigInt), Failure> {
    let a = input::bigint(&v[0]).map_err(Failure::precondition)?;
    let b = input::bigint(&v[1]).map_err(Failure::precondition)?;
    Ok((a, b))
}

pub fn profinite(a: &ProfiniteArgs) -> Outcome {
    let mut inputs = json!({});
    let mut rep = Vec::<(&str, Value)>::new();
    if let Some(v) = &a.haar {
        let (n, r) = pair(v)?;
        let c = ClopenCylinder::new(n.clone(), r)?;
        inputs["haar"] = json!([int(&n), int(c.residue())]);
        rep.push(("measure", json!(c.haar_measure().to_string())));
    }
    let needs_chain = a.embed.is_some() || a.add.is_some() || a.mul.is_some() || a.sub.is_some() || a.dense.is_some();
    if needs_chain {
        let chain = input::chain(&a.chain, a.depth)?;
        inputs["chain"] = json!(a.chain);
        inputs["moduli"] = chain.moduli().iter().map(int).collect();
        if let Some(s) = &a.embed {
            let x = input::bigint(s).map_err(Failure::precondition)?;
            inputs["embed"] = int(&x);
            rep.push(("element", serde_json::to_value(ProfiniteInt::embed(&x, &chain)).expect("serializes")));
        }
        let ops: [(&Option<Vec<String>>, &str, &str); 3] =
            [(&a.add, "add", "sum"), (&a.mul, "mul", "product"), (&a.sub, "sub", "difference")];
        for (arg, flag, key) in ops {
            let Some(v) = arg else { continue };
            let (x, y) = pair(v)?;
            let (px, py) = (ProfiniteInt::embed(&x, &chain), ProfiniteInt::embed(&y, &chain));
            let z = match flag {
                "add" => px.add(&py)?,
                "mul" => px.mul(&py)?,
                _ => px.sub(&py)?,
            };
            inputs[flag] = json!([int(&x), int(&y)]);
            rep.push((key, serde_json::to_value(z).expect("serializes")));
        }
        if let Some(s) = &a.dense {
            let t = input::bigint(s).map_err(Failure::precondition)?;
            inputs["dense"] = int(&t);
            rep.push(("dense", json!(translation_orbit_is_dense(&chain, &t))));
        }
    }
    Ok(rep.into_iter().fold(Report::new("profinite", inputs), |r, (k, v)| r.with(k, v)))
}

// -------------------------------------------------------------- classify-1d

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("source").required(true)
    .args(["tower", "factorial", "type_json", "isomorphic"])))]
pub struct Classify1dArgs {
    /// Degree sequence `n1,n2,...` of a tower of circle covers.
    #[arg(long, value_name = "DEGREES")]
    pub tower: Option<String>,
    /// Repeat the degree block forever.
    #[arg(long, requires = "tower")]
    pub repeat: bool,
    /// The factorial tower (degrees 2, 3, 4, ...).
    #[arg(long)]
    pub factorial: bool,
    /// A type as JSON, e.g. '{"entries":[[2,"inf"]],"default":0}'.
    #[arg(long = "type", value_name = "JSON")]
    pub type_json: Option<String>,
    /// Decide isomorphism of two types given as JSON.
    #[arg(long, num_args = 2, value_names = ["T1", "T2"])]
    pub isomorphic: Option<Vec<String>>,
    /// Test membership of rationals `p/q,...` in the subgroup of the type.
    #[arg(long, value_name = "RATIONALS", allow_negative_numbers = true)]
    pub contains: Option<String>,
}

pub fn classify_1d(a: &Classify1dArgs) -> Outcome {
    if let Some(v) = &a.isomorphic {
        let (t1, t2) = (parse_type(&v[0])?, parse_type(&v[1])?);
        let verdict = t1.isomorphic(&t2);
        let witness = scaling_witness(&t1, &t2).map(|q| q.to_string());
        let inputs = json!({ "isomorphic": [&t1, &t2] });
        return Ok(Report::new("classify-1d", inputs).with("verdict", verdict).with("witness", witness));
    }
    let (inputs, ty, tower) = if let Some(s) = &a.tower {
        let degrees = input::u64_list(s).map_err(Failure::precondition)?;
        let t = SolenoidTower1D::with_repeat(degrees.clone(), a.repeat)?;
        (json!({ "tower": degrees, "repeat": a.repeat }), type_from_tower(&t), t)
    } else if a.factorial {
        let t = SolenoidTower1D::factorial();
        (json!({ "factorial": true }), type_from_tower(&t), t)
    } else {
        let text = a.type_json.as_deref().expect("clap enforces one source");
        let ty = parse_type(text)?;
        let t = tower_from_type(&ty)?;
        (json!({ "type": &ty }), ty, t)
    };
    let mut report = Report::new("classify-1d", inputs)
        .with("type", &ty)
        .with("dense", ty.is_dense_in_q())
        .with("tower", &tower);
    if let Some(qs) = &a.contains {
        let qs = input::rational_list(qs).map_err(Failure::precondition)?;
        let g = RationalSubgroup::new(ty.clone());
        let members: Vec<Value> = qs.iter().map(|q| json!({ "q": q.to_string(), "member": g.contains(q) })).collect();
        report = report.with("contains", members);
    }
    Ok(report)
}

// -------------------------------------------------------------------- tower

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("source").required(true).args(["file", "json"])))]
pub struct TowerArgs {
    /// Tower file `{"n":2,"mats":[...],"repeat":true}`.
    #[arg(long, value_name = "PATH")]
    pub file: Option<PathBuf>,
    /// The tower inline, same format as the file.
    #[arg(long, value_name = "JSON")]
    pub json: Option<String>,
    /// Split a diagonal tower into circle towers and classify the factors.
    #[arg(long)]
    pub classify: bool,
    /// Invariant factors of the fiber group at this level.
    #[arg(long, value_name = "LEVEL")]
    pub fiber: Option<usize>,
    /// Permutation of the fiber induced by the loop class `v1,...,vn`.
    #[arg(long, value_name = "LOOP", requires = "level", allow_negative_numbers = true)]
    pub holonomy: Option<String>,
    #[arg(long)]
    pub level: Option<usize>,
    /// Bounded search for the rational vector `q1,...,qn` in the dual group.
    #[arg(long, value_name = "RATIONALS", allow_negative_numbers = true)]
    pub dual: Option<String>,
    #[arg(long, default_value_t = 16)]
    pub max_depth: usize,
    /// Bounded check that the tower in this file dominates the input tower.
    #[arg(long, value_name = "PATH")]
    pub dominates: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    pub depth: usize,
}

fn read_tower(text: &str, origin: &str) -> Result<TorusTower, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::precondition(format!("{origin}: {e}")))
}

pub fn tower(a: &TowerArgs) -> Outcome {
    let t = match (&a.file, &a.json) {
        (Some(p), _) => read_tower(&input::read(p)?, &p.display().to_string())?,
        (None, Some(s)) => read_tower(s, "--json")?,
        (None, None) => unreachable!("clap enforces one source"),
    };
    let mut inputs = json!({ "tower": &t });
    let mut report = Vec::<(&str, Value)>::new();
    report.push(("dim", json!(t.dim())));
    report.push(("repeat", json!(t.repeat())));
    if a.classify {
        report.push(("split", serde_json::to_value(t.as_product_of_1d()).expect("serializes")));
    }
    if let Some(level) = a.fiber {
        let factors = t.fiber_group(level)?;
        let order: BigInt = factors.iter().product();
        inputs["fiber"] = json!(level);
        report.push(("fiber_group", factors.iter().map(int).collect()));
        report.push(("fiber_order", int(&order)));
    }
    if let Some(l) = &a.holonomy {
        let level = a.level.expect("clap requires --level");
        let v = input::bigint_list(l).map_err(Failure::precondition)?;
        let perm = t.holonomy(&v, level)?;
        inputs["holonomy"] = v.iter().map(int).collect();
        inputs["level"] = json!(level);
        report.push(("trivial", json!(tower::is_identity(&perm))));
        report.push(("permutation", json!(perm)));
    }
    if let Some(q) = &a.dual {
        let q = input::rational_list(q).map_err(Failure::precondition)?;
        let m = t.dual_membership(&q, a.max_depth)?;
        inputs["dual"] = q.iter().map(|x| json!(x.to_string())).collect();
        inputs["max_depth"] = json!(a.max_depth);
        report.push(("membership", serde_json::to_value(m).expect("serializes")));
    }
    if let Some(p) = &a.dominates {
        let other = read_tower(&input::read(p)?, &p.display().to_string())?;
        let verdict = tower::dominates(&t, &other, a.depth)?;
        inputs["dominates"] = json!(&other);
        inputs["depth"] = json!(a.depth);
        report.push(("dominates", json!(verdict)));
    }
    Ok(report.into_iter().fold(Report::new("tower", inputs), |r, (k, v)| r.with(k, v)))
}

// ----------------------------------------------------------------- odometer

#[derive(Args, Debug)]
pub struct OdometerArgs {
    /// `factorial`, `powers:B` or `m1,m2,...`.
    #[arg(long, default_value = "factorial")]
    pub chain: String,
    #[arg(long)]
    pub depth: Option<usize>,
    /// Apply the first-return map to the point with these residues.
    #[arg(long, value_name = "RESIDUES")]
    pub first_return: Option<String>,
    /// Apply the first-return map to the embedded integer.
    #[arg(long, value_name = "A", conflicts_with = "first_return", allow_negative_numbers = true)]
    pub first_return_of: Option<String>,
}

pub fn odometer(a: &OdometerArgs) -> Outcome {
    let chain = input::chain(&a.chain, a.depth)?;
    let mut inputs = json!({ "chain": a.chain, "moduli": chain.moduli().iter().map(int).collect::<Vec<_>>() });
    let o = Odometer::new(chain.clone());
    let walkable = chain.moduli().iter().take_while(|m| m.to_u64().is_some_and(|m| m <= MAX_ORBIT_WALK)).count();
    let covers = (1..=walkable).map(|k| o.orbit_covers_level(k)).collect::<Result<Vec<_>, _>>()?;
    let ty = o.matches_dual_type();
    let mut report = Report::new("odometer", json!({}))
        .with("degrees", o.degrees())
        .with("type", &ty)
        .with("dense", ty.is_dense_in_q())
        .with("tower", o.tower())
        .with("covers", covers);
    let x = if let Some(r) = &a.first_return {
        let residues = input::bigint_list(r).map_err(Failure::precondition)?;
        inputs["first_return"] = residues.iter().map(int).collect();
        Some(ProfiniteInt::from_residues(chain, residues)?)
    } else if let Some(s) = &a.first_return_of {
        let v = input::bigint(s).map_err(Failure::precondition)?;
        inputs["first_return_of"] = int(&v);
        Some(ProfiniteInt::embed(&v, &chain))
    } else {
        None
    };
    if let Some(x) = x {
        report = report.with("image", o.first_return(&x)?);
    }
    report.inputs = inputs;
    Ok(report)
}

// -------------------------------------------------------------------- solv3

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("query").required(true)
    .args(["isometric", "commensurable", "from_field", "invariant"])))]
pub struct Solv3Args {
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_hyphen_values = true)]
    pub isometric: Option<Vec<String>>,
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_hyphen_values = true)]
    pub commensurable: Option<Vec<String>>,
    /// Squarefree d >= 2; prints the canonical monodromy of Q(sqrt d).
    #[arg(long, value_name = "D")]
    pub from_field: Option<u64>,
    #[arg(long, value_name = "A", allow_hyphen_values = true)]
    pub invariant: Option<String>,
}

fn format_mat2(m: &[[BigInt; 2]; 2]) -> String {
    format!("{},{};{},{}", m[0][0], m[0][1], m[1][0], m[1][1])
}

pub fn solv3(a: &Solv3Args) -> Outcome {
    if let Some(v) = &a.commensurable {
        let (ma, mb) = (matrix(&v[0])?, matrix(&v[1])?);
        let (fa, fb) = (solv3::field_invariant(&ma)?, solv3::field_invariant(&mb)?);
        let verdict = solv3::commensurable_bundles(&ma, &mb)?;
        let (la, lb) = (solv3::eigen_data(&ma)?.lambda, solv3::eigen_data(&mb)?.lambda);
        let mut r = Report::new("solv3", json!({ "commensurable": [ma.to_string(), mb.to_string()] }))
            .with("verdict", verdict)
            .with("fields", [fa, fb])
            .with("lambdas", [la.to_string(), lb.to_string()]);
        if verdict {
            r = r.with("field", fa).with("lambda", la.to_string());
        }
        return Ok(r);
    }
    if let Some(v) = &a.isometric {
        let (ma, mb) = (matrix(&v[0])?, matrix(&v[1])?);
        let direct = solv3::gl2z_conjugator(&ma, &mb);
        let conjugator = match &direct {
            Some(p) => Some((format_mat2(p), false)),
            None => solv3::gl2z_conjugator(&ma, &mb.inverse()).map(|p| (format_mat2(&p), true)),
        };
        let (fa, la) = (solv3::field_invariant(&ma)?, solv3::eigen_data(&ma)?.lambda);
        let inputs = json!({ "isometric": [ma.to_string(), mb.to_string()] });
        let r = Report::new("solv3", inputs)
            .with("verdict", conjugator.is_some())
            .with("field", fa)
            .with("lambda", la.to_string())
            .with("conjugator", conjugator.as_ref().map(|(p, _)| p))
            .with("inverted", conjugator.as_ref().map(|(_, inv)| inv));
        return Ok(r);
    }
    if let Some(d) = a.from_field {
        let f = QuadField::new(d)?;
        let m = solv3::matrix_from_field(f)?;
        let unit = solv3::fundamental_unit(f);
        let lambda = solv3::eigen_data(&m)?.lambda;
        return Ok(Report::new("solv3", json!({ "from_field": d }))
            .with("field", f)
            .with("unit", unit.to_string())
            .with("unit_norm", unit.norm().to_string())
            .with("matrix", m.to_string())
            .with("lambda", lambda.to_string()));
    }
    let s = a.invariant.as_deref().expect("clap enforces one query");
    let m = matrix(s)?;
    let e = solv3::eigen_data(&m)?;
    Ok(Report::new("solv3", json!({ "invariant": m.to_string() }))
        .with("field", e.field)
        .with("trace", m.trace().to_string())
        .with("lambda", e.lambda.to_string())
        .with("lambda_inv", e.lambda_inv.to_string())
        .with("expanding_slope", e.expanding_slope.to_string())
        .with("contracting_slope", e.contracting_slope.to_string()))
}

// --------------------------------------------------------------- ricci-flow

#[derive(Args, Debug)]
pub struct RicciArgs {
    /// `genus2-grid:MxN`, `genus2-one-vertex`, `torus:MxN` or a mesh JSON file.
    #[arg(long, default_value = "genus2-grid:10x10")]
    pub mesh: String,
    /// Number of fibers; fiber k starts from the metric perturbed with seed + k.
    #[arg(long, default_value_t = 1)]
    pub fibers: u64,
    /// Amplitude of the uniform perturbation of the log-radii.
    #[arg(long, default_value_t = 0.1)]
    pub perturb: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Target curvature: `auto` for 2πχ/V, or a number.
    #[arg(long, default_value = "auto")]
    pub c: String,
    #[arg(long, default_value_t = 0.1)]
    pub dt: f64,
    #[arg(long, default_value_t = 100_000)]
    pub max_steps: usize,
    /// CSV trace path; with several fibers, `-<label>` is inserted before the extension.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

fn fiber_path(base: &std::path::Path, label: u64, fibers: u64) -> PathBuf {
    if fibers == 1 {
        return base.to_path_buf();
    }
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match base.extension() {
        Some(ext) => format!("{stem}-{label}.{}", ext.to_string_lossy()),
        None => format!("{stem}-{label}"),
    };
    base.with_file_name(name)
}

pub fn ricci_flow(a: &RicciArgs) -> Outcome {
    let mesh = input::mesh(&a.mesh)?;
    let c = if a.c == "auto" {
        ricci::compatible_curvature(&mesh)
    } else {
        a.c.parse::<f64>().map_err(|_| Failure::precondition(format!("--c must be `auto` or a number, got {:?}", a.c)))?
    };
    if a.fibers == 0 {
        return Err(Failure::precondition("--fibers must be at least 1"));
    }
    if !(a.perturb.is_finite() && a.perturb >= 0.0) {
        return Err(Failure::precondition(format!("--perturb must be finite and >= 0, got {}", a.perturb)));
    }
    if !(a.tol.is_finite() && a.tol > 0.0) {
        return Err(Failure::precondition(format!("--tol must be positive, got {}", a.tol)));
    }
    let base = CirclePackingMetric::uniform(mesh.vertex_count());
    let fam = FiberFamily::new(
        a.fibers,
        (0..a.fibers).map(|k| (k, base.perturbed(a.perturb, a.seed.wrapping_add(k)))).collect(),
    )?;
    let cfg = FlowConfig { tol: a.tol, max_steps: a.max_steps, dt: a.dt };
    let rep = ricci::laminated_flow(&mesh, &fam, c, &cfg)?;
    let mut traces = Vec::new();
    for (label, trace) in &rep.traces {
        let path = a.out.as_ref().map(|p| fiber_path(p, *label, a.fibers));
        if let Some(p) = &path {
            input::write(p, &trace.to_csv())?;
        }
        let last = trace.records.last().expect("trace has the initial record");
        traces.push(json!({
            "label": label,
            "steps": last.step,
            "t": last.t,
            "max_dev": last.max_dev,
            "total_curv": last.total_curv,
            "csv": path.map(|p| p.display().to_string()),
        }));
    }
    let inputs = json!({
        "mesh": a.mesh,
        "fibers": a.fibers,
        "perturb": a.perturb,
        "c": a.c,
    });
    Ok(Report::new("ricci-flow", inputs)
        .with(
            "mesh",
            json!({
                "vertices": mesh.vertex_count(),
                "faces": mesh.face_count(),
                "euler": mesh.euler_characteristic(),
                "genus": mesh.genus(),
            }),
        )
        .with("c", c)
        .with("converged", true)
        .with("traces", traces)
        .with("input_modulus", rep.input_modulus)
        .with("output_modulus", rep.output_modulus)
        .with("continuity_constant", rep.continuity_constant)
        .with("identical_inputs_agree", rep.identical_inputs_agree)
        .seed(a.seed)
        .schedule(json!({ "scheme": "euler", "dt": a.dt, "tol": a.tol, "max_steps": a.max_steps })))
}

// ----------------------------------------------------------------- harmonic

#[derive(Args, Debug)]
pub struct HarmonicArgs {
    /// Graph JSON: vertices, edges [[u,v,w],...], pins [{"vertex":i,"point":[x,y]}], optional initial.
    #[arg(long, value_name = "PATH")]
    pub graph: PathBuf,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 100_000)]
    pub max_steps: usize,
    /// Fraction of the geodesic towards the weighted centroid taken per step.
    #[arg(long, default_value_t = 1.0)]
    pub dt: f64,
    /// Starting point `x,y` of the free vertices when the file has no initial map.
    #[arg(long, value_name = "X,Y", default_value = "0,0", allow_hyphen_values = true)]
    pub start: String,
    /// CSV of the energy after each step (columns step,energy).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

fn point(s: &str) -> Result<Complex64, Failure> {
    let bad = || Failure::precondition(format!("expected a point x,y, got {s:?}"));
    let (x, y) = s.split_once(',').ok_or_else(bad)?;
    let x: f64 = x.trim().parse().map_err(|_| bad())?;
    let y: f64 = y.trim().parse().map_err(|_| bad())?;
    Ok(Complex64::new(x, y))
}

pub fn harmonic(a: &HarmonicArgs) -> Outcome {
    let text = input::read(&a.graph)?;
    let (g, initial) = LeafGraph::from_json(&text)?;
    if !(a.tol.is_finite() && a.tol > 0.0) {
        return Err(Failure::precondition(format!("--tol must be positive, got {}", a.tol)));
    }
    let f0 = match initial {
        Some(f) => f,
        None => g.initial_map(point(&a.start)?)?,
    };
    let run = harmonic::flow_to_harmonic(&g, &f0, a.tol, a.max_steps, a.dt)?;
    if let Some(p) = &a.out {
        let mut csv = String::from("step,energy\n");
        for (k, e) in run.energies.iter().enumerate() {
            csv.push_str(&format!("{k},{e:e}\n"));
        }
        input::write(p, &csv)?;
    }
    let grad = harmonic::energy_gradient(&g, &run.map).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let inputs = json!({ "graph": a.graph.display().to_string(), "start": a.start });
    Ok(Report::new("harmonic", inputs)
        .with("map", &run.map.points.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>())
        .with("energy", run.energies.last().copied())
        .with("initial_energy", run.energies[0])
        .with("steps", run.steps)
        .with("last_displacement", run.last_displacement)
        .with("gradient_norm", grad)
        .with("slope_steps", run.slope_steps.len())
        .schedule(json!({ "dt": a.dt, "tol": a.tol, "max_steps": a.max_steps })))
}
