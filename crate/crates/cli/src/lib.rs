//! Command-line harness around the `wsdelay` library: TOML run configs,
//! frequency sweeps, CSV matrices and a JSON report.

pub mod config;
pub mod csvio;
pub mod error;
pub mod report;
pub mod run;
pub mod systems;

pub use error::{CliError, Result};
