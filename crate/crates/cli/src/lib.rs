//! File I/O, configuration and benchmarking around the `lumen` pipelines.

pub mod bench;
pub mod config;
pub mod error;
pub mod io;

pub use error::{CliError, Result};
