//! Command-line driver for the cascade model: configuration files, the five
//! experiment commands, and their CSV and JSON outputs.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{execute, CliError, Command, CommandOutput};
pub use config::{load_config, parse_config, ConfigError, RunConfig};
pub use output::{manifest_path, write_outputs, RunManifest};
