//! Anytime robot base-pose optimization.
//!
//! Given a serial manipulator and a task (goal poses, obstacles and an allowed
//! region for the base), find the base pose with the shortest cycle time. The
//! crate bundles the pieces needed for that and for comparing optimizers
//! under a fixed budget:
//!
//! - [`se3`]: poses, axis-angle rotations, the goal distance, Hammersley points;
//! - [`robot`]: kinematics, reach and capsule collision checks;
//! - [`task`]: task model, JSON files and the simple/hard/edge generators;
//! - [`solver`]: the per-pose feasibility pipeline and its cycle-time cost;
//! - [`optimizers`]: dummy, random, genetic, Bayesian and Adam-based search;
//! - [`bench`]: fixed-budget benchmark runs, bootstrap statistics and reports.

pub mod bench;
pub mod cli;
pub mod error;
pub mod optimizers;
pub mod robot;
pub mod se3;
pub mod solver;
pub mod task;

pub use error::{Error, Result};
