//! Command-line harness for the hybrid non-local means denoiser: noise
//! synthesis, denoising, PSNR and the benchmark grid over the standard test
//! images, with JSON reports.

pub mod bench;
pub mod commands;
pub mod config;
pub mod error;
pub mod reference_tables;
pub mod report;

pub use commands::{run, Cli};
pub use error::{CliError, CliResult};
