//! Scenario files, CSV output and the `fracanneal` command line on top of
//! [`fracanneal_core`].

pub mod cli;
pub mod commands;
pub mod error;
pub mod exec;
pub mod output;
pub mod scenario;

pub use error::{Category, CliError, CliResult};
