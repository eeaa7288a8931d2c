//! Command-line front end: configuration, file formats and the three commands.

pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::{Cli, Command, Format, RunConfig};
pub use error::CliError;
