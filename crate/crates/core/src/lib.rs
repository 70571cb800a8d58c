//! Simulator and verifier for a finite-injury construction of a minimal
//! pair in the generic degrees.
//!
//! The construction builds two sets `A_0`, `A_1` stage by stage against a
//! finite listing of partial functionals `Φ_e`; the partial functions
//! `f_j` (value 1 off `A_j`) are then generic descriptions of the diagonal
//! sets `X_j`. [`analysis`] checks, at finite horizons, every invariant the
//! correctness argument relies on, and cross-validates the engine against an
//! independent brute-force transcription of the stage rule.
//!
//! Numbers are [`Nat`]; densities are exact rationals ([`Density`]). The
//! [`arith`] layer is generic over any unsigned primitive integer.

pub mod analysis;
pub mod arith;
pub mod config;
pub mod engine;
pub mod graphs;
pub mod operators;
pub mod scenarios;
pub mod suites;
pub mod trace;

/// Natural numbers as used throughout the construction.
pub type Nat = u64;

/// A coded graph point `pair(n, v)` or any other pair code.
pub type Code = Nat;

/// Exact finite densities.
pub type Density = num_rational::Ratio<Nat>;

pub use arith::{pair, r_index, unpair, PriorityIndex, Side};
pub use config::{parse_config, RunConfig};
pub use engine::{current_description, step, ConstructionState, Variant};
pub use graphs::{check_description, extends, PartialGraph};
pub use operators::{Axiom, EnumOperator};
pub use suites::{build_suite, FunctionalSuite, OperatorSuite};
pub use trace::{Replay, Trace, TraceEvent};
