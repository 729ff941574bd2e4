//! Command-line front end for `billiards-core`: table files, JSON reports,
//! CSV trajectories, and SVG figures.

pub mod commands;
pub mod error;
pub mod format;
pub mod input;
pub mod report;
pub mod svg;

pub use commands::{run, Cli, Command, Outcome};
pub use error::CliError;
pub use report::RunReport;
