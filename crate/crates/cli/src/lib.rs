//! Command-line surface for `heckenil`: index sweeps with a JSON-lines cache, verification
//! suites, and partition tables.

pub mod args;
pub mod cache;
pub mod commands;
pub mod output;
pub mod suites;

pub use args::Cli;
pub use commands::{run, ConfigError};
