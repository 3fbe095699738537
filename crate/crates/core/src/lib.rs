//! Classified maximum matching (CMM): assigning items to platforms under
//! per-class upper-bound quotas, together with the equivalent generalized
//! maximum independent set (GMIS) problem on capacitated hypergraphs.
//!
//! The crate provides:
//! - [`model`]: core instance/assignment types, feasibility checking, JSON I/O
//! - [`laminar`]: laminarity tests, laminar forests, and partitioning a class
//!   collection into laminar families (the parameter Δ)
//! - [`approx`]: greedy maximal algorithms with 1/Δ and 1/(Δ+1) guarantees,
//!   the bounded-average-degree algorithm, and sequential composition
//! - [`exact`]: brute-force oracle, max-flow solver for laminar classes, and
//!   the type-based integer program for few classes
//! - [`online`]: arrival simulation and competitive-ratio measurement
//! - [`reductions`]: constructive reductions from neighboring problems
//!   (independent set, hypergraph GMIS, fair ranking, simultaneous matchings)
//! - [`bench`]: synthetic instance generator and experiment harness

pub mod approx;
pub mod bench;
pub mod exact;
pub mod fixtures;
pub mod laminar;
pub mod model;
pub mod online;
pub mod reductions;

pub use model::{Assignment, ClassConstraint, Instance, ValidationError};

use thiserror::Error;

/// Why a solver could not run on an instance. Distinct from
/// [`ValidationError`]: the instance is well-formed, but outside the
/// algorithm's applicability conditions.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("instance has {edges} edges, exceeding the brute-force limit {limit}")]
    InstanceTooLarge { edges: usize, limit: usize },
    #[error("classes of {owner} are not laminar")]
    NotLaminar { owner: String },
    #[error("{algo} supports only unweighted instances")]
    WeightedNotSupported { algo: &'static str },
    #[error("platform {platform} has {classes} classes, exceeding the cap {cap}")]
    TooManyClasses {
        platform: String,
        classes: usize,
        cap: usize,
    },
    #[error("{algo} requires a single platform, instance has {platforms}")]
    SinglePlatformRequired {
        algo: &'static str,
        platforms: usize,
    },
    #[error("{algo} requires a many-to-one instance (item quotas 1, no item classes)")]
    ManyToOneRequired { algo: &'static str },
    #[error("offline optimum is zero; competitive ratios are undefined")]
    DegenerateOpt,
}
