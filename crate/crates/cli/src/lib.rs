//! Command-line front end for ogc-core: slice enumeration, homology
//! tables, verification suites and a content-addressed result cache.

pub mod cache;
pub mod config;
pub mod error;
pub mod jobs;
pub mod record;

pub use config::{Args, Command, JobConfig, OutputFormat};
pub use error::CliError;
pub use record::{ResultRecord, Row};
