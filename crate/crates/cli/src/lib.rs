//! Experiment runner for the double-well toolkit: sweeps, quenches and
//! open-system runs written as CSV or JSON tables.

pub mod config;
pub mod error;
pub mod experiments;
pub mod table;
pub mod verify;

pub use config::{ConfigFile, Experiment, ExperimentConfig, OutputFormat};
pub use error::{CliError, Result};
pub use experiments::run;
pub use table::{write_tables, Cell, Table};
