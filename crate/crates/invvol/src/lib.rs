//! Std companion to `invvol-core`: multi-threaded Monte Carlo, quote files,
//! run configuration and the `invvol` command line.

pub mod cli;
pub mod config;
pub mod error;
pub mod parallel;
pub mod quotes;

pub use error::{Error, Result};
pub use parallel::Parallel;
