//! Command-line front end for quaternion ℓ1 recovery: one-shot recovery,
//! demo instances, recovery-rate sweeps and heatmap rendering.

pub mod commands;
pub mod config;
pub mod io;
pub mod svg;

pub use config::{Cli, CliCommand, Command, Flags, RunConfig};
