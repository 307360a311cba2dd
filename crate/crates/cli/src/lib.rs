//! File formats, run configuration and subcommands behind the `matisk`
//! binary.

pub mod commands;
pub mod config;
pub mod iqfile;

pub use config::RunConfig;
pub use iqfile::{read_iq, write_iq, IqFileError};
