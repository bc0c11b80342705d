//! Host-side tooling for `sigmin-core`: a parallel trial runner, experiment
//! config files, JSONL records with CSV summaries, reference oracles and the
//! acceptance suite.

pub mod acceptance;
pub mod config;
pub mod experiment;
pub mod oracle;
pub mod parallel;
pub mod record;
pub mod workloads;

pub use config::{ConfigError, ExperimentConfig, ExperimentKind};
pub use experiment::{run_experiment, RunError};
pub use record::{ExperimentRecord, RecordError};
