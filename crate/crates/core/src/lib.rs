//! Quantum channels on finite qudit lattices.
//!
//! Channels are held through their Choi states. On top of that sit the
//! locality predicates (causality preservation, locality preservation,
//! factorization, unitarity), the commuting-projector construction of a
//! tensor-network representation for quantum cellular automata, and
//! entropy based area-law audits.

pub mod channels;
pub mod classify;
pub mod entanglement;
pub mod error;
pub mod lattice;
pub mod sampling;
pub mod selftest;
pub mod tensor;
pub mod tn;

pub use error::{Error, Result};
pub use lattice::{Boundary, Lattice, RegionPartition, RegionPolicy, SiteSet};

/// Tolerance for equality, Hermiticity and positivity checks.
pub const EPS_NUM: f64 = 1e-9;

/// Default tolerance for classification verdicts.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Absolute singular-value cutoff when splitting a normalized state.
pub const EPS_SVD: f64 = 1e-10;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
