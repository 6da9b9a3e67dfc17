//! Online learning of randomized function placement under per-node resource
//! constraints.
//!
//! A controller observes functions arriving one per slot, places each on a
//! node, and learns unknown placement costs, resource demands and arrival
//! rates from bandit feedback. Policies come from a linear program solved on
//! KL confidence bounds: optimistic for cost and arrivals, pessimistic for
//! load. A fast variant only re-solves on a geometric schedule.
//!
//! Modules, bottom-up:
//!
//! - [`model`]: instances, policies, the cost `f` and load `g` functions
//! - [`environment`]: seeded simulator of arrivals, demands and costs
//! - [`estimation`]: running statistics and Bernoulli-KL confidence bounds
//! - [`lp`]: the placement program and its dense simplex solver
//! - [`controller`]: base and fast decision loops with forced exploration
//! - [`harness`]: multi-run experiments, metrics, CSV/JSON output, sweeps
//!
//! See the crate's `examples/` directory for one runnable program per capability.

pub mod controller;
pub mod environment;
pub mod error;
pub mod estimation;
pub mod harness;
pub mod lp;
pub mod model;
pub mod rng;

pub use controller::{
    apply_forced_exploration, draw_node, Controller, ControllerConfig, Mode, UpdateSchedule,
};
pub use environment::{sample_instance, Environment, EnvironmentConfig, SlotObservation};
pub use error::{Error, Result};
pub use estimation::{
    kl_bernoulli, lower_confidence, upper_confidence, ConfidenceBounds, ObservationState,
};
pub use harness::{run_experiment, AlgorithmSpec, ExperimentConfig, ExperimentResult, RunTrace};
pub use lp::{oracle_policy, solve_placement_lp, PlacementLp};
pub use model::{constraint_g, max_constraint, objective_f, KappaTensor, Policy, ProblemInstance};
