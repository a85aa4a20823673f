//! Configuration files, field files and the subcommands of the `vortex`
//! command-line program.

pub mod commands;
pub mod config;
pub mod error;
pub mod fieldfile;

pub use config::{parse_config, RunConfig};
pub use error::{CliError, Result};
pub use fieldfile::{read_fields, write_fields, FieldFile};
