//! Experiment registry and command-line plumbing for the lattice model.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod registry;

pub use config::{ExperimentConfig, Horizon, Overrides};
pub use error::CliError;
pub use experiments::{Outcome, Row};

/// Validates and runs one experiment; nothing is written to disk.
pub fn run(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let entry = registry::lookup(&config.experiment)?;
    let problems = config.violations();
    if !problems.is_empty() {
        return Err(CliError::Config(problems));
    }
    (entry.run)(config)
}
