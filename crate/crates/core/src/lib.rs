//! Hierarchical partition-based multi-objective optimization driven by
//! pluggable candidate generators and surrogate predictors.
//!
//! The search loop repeatedly partitions the decision space with a KD-tree,
//! scores the leaves, samples promising regions, asks a generator for
//! candidates inside them and evaluates the batch with the highest predicted
//! hypervolume.

pub mod benchmarks;
pub mod domain;
pub mod engine;
pub mod error;
pub mod exec;
pub mod hypervolume;
pub mod partition;
pub mod sampler;
pub mod scoring;
pub mod surrogate;
pub mod usage;

pub use benchmarks::{Benchmark, BenchmarkSpec};
pub use domain::{Bounds, DecisionVector, History, ObjectiveVector, Observation};
pub use engine::{Components, Mode, RunConfig, RunRecord, TrialRecord};
pub use error::{Error, Result};
pub use exec::Exec;
pub use usage::Usage;
