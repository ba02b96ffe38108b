//! Simulation and learning framework for multi-agent informative path planning
//! over lake-monitoring scenarios.
//!
//! A fleet of autonomous surface vehicles samples an unknown scalar field on a
//! navigability grid. A bank of local Gaussian processes fuses the samples into
//! a live contamination model, and fleet policies (a dueling double deep
//! Q-learner plus three baseline planners) are trained and evaluated against
//! estimation-error metrics under hard collision constraints.
//!
//! The crate is organised around the data flow of one mission:
//!
//! * [`grid`] — the discrete navigation world (cells, metric distances, the
//!   8-direction motion model, deployment zones).
//! * [`groundtruth`] — seeded generators for the two benchmark scalar fields.
//! * [`gp`] — exact Gaussian-process regression with RBF kernel and
//!   marginal-likelihood lengthscale fitting.
//! * [`localgp`] — the bank of local GPs and the distance-weighted fusion of
//!   their posteriors into global mean/uncertainty surfaces.
//! * [`env`] — the fleet POMDP: episode lifecycle, 5-channel observations,
//!   information-gain rewards with redundancy discounting.
//! * [`learner`] — dueling double deep Q-learning with the collision-free
//!   consensus action selector.
//! * [`baselines`] — lawn-mower, random-wanderer and GP-enhanced PSO planners.
//! * [`metrics`] / [`harness`] — estimation-error metrics, experiment
//!   orchestration, CSV/image artifact emission.
//!
//! With the default `parallel` feature the data-parallel inner loops (per-GP
//! refits, fused-surface assembly, episode batches) run on rayon; without it
//! every code path falls back to its sequential twin.

pub mod baselines;
pub mod env;
pub mod error;
pub mod gp;
pub mod grid;
pub mod groundtruth;
pub mod harness;
pub mod learner;
pub mod localgp;
pub mod metrics;
pub mod par;
pub mod rng;

pub use error::{Error, Result};
