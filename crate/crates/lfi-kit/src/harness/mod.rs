//! Experiment harness: run configuration, CSV/manifest emission, and the
//! command implementations behind the CLI subcommands.

pub mod commands;
pub mod config;
pub mod csv;
pub mod manifest;

pub use commands::{cmd_abc, cmd_bolfi, cmd_curve, cmd_dist, exit_code};
pub use config::RunConfig;
pub use csv::{read_csv, write_csv, SCHEMA_LINE};
pub use manifest::{ManifestBuilder, RunManifest};
