//! Sweeps, threshold searches and CSV/JSON output for the GME criteria.

pub mod analysis;
pub mod cli;
pub mod config;
pub mod error;
pub mod format;

pub use cli::{run, run_cli};
pub use error::{CliError, Result};
