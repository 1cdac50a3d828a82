//! Experiment driver for `subquery-core`: configuration, parallel Monte
//! Carlo trials, CSV output and the clique analyses.

pub mod analysis;
pub mod config;
pub mod error;
pub mod harness;
pub mod output;
pub mod stats;

pub use config::ExperimentConfig;
pub use error::{LabError, Result};
pub use harness::{Experiment, PointResult, ResultRow, TrialRecord};
pub use output::{scaling_experiment, ScalingReport};
