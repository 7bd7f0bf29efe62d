//! Std companion to `railwave-core`: run configuration, parallel drivers,
//! CSV tables, the binary dataset formats and the command-line front end.

pub mod cli;
pub mod config;
pub mod dataset;
pub mod error;
pub mod parallel;
pub mod table;

pub use config::Settings;
pub use error::{DatasetError, Error, Result};
