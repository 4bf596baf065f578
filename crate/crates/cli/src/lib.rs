//! Configuration, command implementations and output rendering for the
//! `trapcs` command-line tool.

pub mod commands;
pub mod config;
pub mod error;

pub use commands::{dequantize, scan, simulate, verify, Check, RunOptions, Status, VerifyReport, TOOL};
pub use config::{Resolved, RunConfig};
pub use error::CliError;
