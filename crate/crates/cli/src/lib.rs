//! Command-line front end: configuration loading, subcommand dispatch and
//! CSV/JSON emitters.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{run, Cli, Command};
pub use config::{load_config, ConfigError, ExperimentConfig};
