//! File formats, synthetic scenarios, self checks and the command
//! implementations behind the `nlspec` binary.

pub mod checks;
pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod synth;

pub use error::{CliError, CliResult};
