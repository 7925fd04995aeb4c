//! Config parsing, sweep execution and table output for the `su11net` binary.

pub mod app;
pub mod config;
pub mod emit;
pub mod run;

pub use config::{parse_config, ConfigErrors, ExperimentConfig};
pub use emit::{emit, render, EmitError};
pub use run::{run_experiment, Row};
