//! Command-line front end: scenario files, presets, output tables and the
//! validation suite.

pub mod bands;
pub mod config;
pub mod error;
pub mod presets;
pub mod run;
pub mod validation;

pub use config::{Scenario, ScenarioConfig};
pub use error::{CliError, Result};
