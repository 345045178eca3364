//! Library behind the `perfport` command line tool: configuration and
//! timing-data ingestion, analysis orchestration, and deterministic
//! SVG/markdown/JSON rendering.
//!
//! Everything here is exercised both through the binary and directly from
//! integration tests; all emitters are byte-stable for identical inputs.

pub mod commands;
pub mod config;
pub mod error;
pub mod ingest;
pub mod render;
pub mod report;

pub use commands::{run_cli, Cli, Command};
pub use error::CliError;
