//! Batch runner for Berry phase cumulant studies: configuration, execution
//! and report files behind the `berrycum` binary.

pub mod config;
pub mod error;
pub mod report;
pub mod runner;

pub use config::{RunConfig, Task};
pub use error::RunError;
pub use report::RunReport;
pub use runner::run;
