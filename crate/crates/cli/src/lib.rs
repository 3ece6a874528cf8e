//! Ingestion, configuration, synthetic data and the commands behind `hfts`.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod ingest;
pub mod manifest;
pub mod synth;

pub use error::{CliError, Result};
