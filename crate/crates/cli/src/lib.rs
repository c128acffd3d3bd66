//! Batch front end: configuration, pipeline orchestration, artifacts and
//! report tables.

pub mod config;
pub mod error;
pub mod grid;
pub mod pipeline;
pub mod report;

pub use config::{SampleSpec, Tolerances, WorkbenchConfig};
pub use error::WorkbenchError;
pub use pipeline::{run_pipeline, RunManifest};
pub use report::report;
