//! Configuration-driven front end for `slrsm-core`: config parsing, the
//! sample-table cache, the run pipeline and its output files.

pub mod cache;
pub mod config;
pub mod hash;
pub mod output;
pub mod pipeline;
pub mod report;

pub use config::{ConfigError, LoadedConfig, RunConfig};
pub use pipeline::{execute, RunOptions, RunOutcome};
pub use report::RunReport;
