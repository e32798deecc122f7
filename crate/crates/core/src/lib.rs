//! Executable pieces of the theory of solenoidal manifolds.
//!
//! The crate is organised by subsystem:
//!
//! - [`profinite`]: exact arithmetic in truncations of the profinite integers,
//!   cylinder Haar measure and density of the embedded integers.
//! - [`rank_one`]: Baer types of subgroups of the rationals and the
//!   classification of one-dimensional homogeneous solenoids.
//! - [`tower`]: covering towers of the n-torus, fiber groups, holonomy and
//!   bounded domination checks.
//! - [`suspension`]: odometers as first-return maps of one-dimensional
//!   solenoids.
//! - [`solv3`]: isometry and commensurability of Solv torus bundles through
//!   real quadratic fields.
//! - [`ricci`]: combinatorial Ricci flow on circle-packing metrics over a
//!   finite family of transversal fibers.
//! - [`harmonic`]: discrete harmonic-map heat flow into the hyperbolic plane.
//!
//! [`report`] holds the machine-readable report shared by the command line
//! front end.

pub mod arith;
pub mod error;
pub mod harmonic;
pub mod profinite;
pub mod rank_one;
pub mod report;
pub mod ricci;
pub mod solv3;
pub mod suspension;
pub mod tower;

mod bigint_serde;

pub use error::{Error, ErrorKind};
pub use harmonic::{DiscreteMap, LeafGraph};
pub use profinite::{ClopenCylinder, ModulusChain, ProfiniteInt};
pub use rank_one::{BaerType, Exponent, RationalSubgroup, SolenoidTower1D, Tail};
pub use report::Report;
pub use ricci::{CirclePackingMetric, FiberFamily, FlowTrace, TriMesh};
pub use solv3::{HypMatrix, QuadField, QuadNumber};
pub use suspension::Odometer;
pub use tower::{DualMembership, TorusTower};

pub use num_bigint::BigInt;
pub use num_rational::BigRational;
