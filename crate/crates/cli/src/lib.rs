//! Command-line front end and HTTP service.

pub mod cli;
pub mod manifest;
pub mod service;

pub use cli::{execute, run, Cli, CliError};
