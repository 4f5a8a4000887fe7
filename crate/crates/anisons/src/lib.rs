//! Field IO, norm ledgers, experiment configs and reports around
//! [`anisons_core`], plus the `anisons` batch front-end.

pub mod afld;
pub mod config;
pub mod error;
pub mod hash;
pub mod ledger_csv;
pub mod report;
pub mod run;
pub mod verify_cmd;

pub use config::{Command, ExperimentConfig};
pub use error::{AppError, AppResult, ConfigError};
pub use run::{run, Outcome, RunOptions};
