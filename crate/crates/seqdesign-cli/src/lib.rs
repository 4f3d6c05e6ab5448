//! Experiment configuration, run orchestration, and machine-readable output
//! for the sequence design solver.

pub mod config;
pub mod error;
pub mod experiment;
pub mod intervals;
pub mod io;

pub use config::ExperimentConfig;
pub use error::CliError;
pub use experiment::{run_experiment, Summary};
