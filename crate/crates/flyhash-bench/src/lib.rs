//! IO and orchestration around `flyhash-core`: dataset file readers, the
//! experiment grid, and CSV reporting.

pub mod config;
pub mod error;
pub mod grid;
pub mod ingest;
pub mod runner;

pub use error::BenchError;
