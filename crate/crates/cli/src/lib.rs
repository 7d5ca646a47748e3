//! Config-driven front end for `ldg-core`: identity and bulk verification,
//! coercivity audits, single minimizations and L sweeps. Every command
//! returns a [`ResultRecord`]; the binary writes it as JSON next to any CSV
//! table or field snapshot the command produced.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod coercivity;
mod config;
mod record;
mod run;
mod verify;

pub use coercivity::cmd_coercivity;
pub use config::{
    MaterialSection, OutputSection, RunConfig, SamplingSection, Scenario, SolverSection, ToleranceSection,
};
pub use record::{Check, ResultRecord, Status, SCHEMA_VERSION};
pub use run::{cmd_minimize, cmd_sweep, initial_field, Outcome, CSV_HEADER};
pub use verify::{brute_force_projection, cmd_verify, cmd_verify_with, fibonacci_sphere, VerifyHooks};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] ldg_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;
