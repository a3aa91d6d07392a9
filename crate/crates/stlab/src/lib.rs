//! Configuration, execution and reporting for the `stlab` command line.

pub mod config;
pub mod run;
pub mod selftest;

pub use config::{parse_config, parse_config_as, Command, ConfigError, RunConfig};
pub use run::{run, CliError, Outcome};
