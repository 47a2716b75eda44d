//! Command-line frontend, file formats and parallel drivers for
//! [`maplace_core`].

pub mod commands;
pub mod config;
pub mod error;
pub mod formats;
pub mod parallel;
pub mod verify;

pub use error::{CliError, Result};
