//! Configuration, manifest and driver behind the `kfib-balance` binary.

pub mod config;
pub mod error;
pub mod manifest;
pub mod report;
pub mod verify;

pub use config::{KRange, OutputFormat, RunConfig};
pub use error::{CliError, CliResult};
pub use manifest::Manifest;
pub use verify::{verify_all, VerifyOutcome};
