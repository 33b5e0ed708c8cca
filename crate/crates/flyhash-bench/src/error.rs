//! Error type for ingestion, configuration, and reporting.

use flyhash_core::CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("core: {0}")]
    Core(#[from] CoreError),

    #[error("truncated record at byte offset {offset}")]
    TruncatedRecord { offset: u64 },

    #[error("inconsistent dimension in record {record}: expected {expected}, got {got}")]
    InconsistentDim {
        expected: usize,
        got: usize,
        record: usize,
    },

    #[error("bad magic: expected {expected:#010x}, got {got:#010x}")]
    BadMagic { expected: u32, got: u32 },

    #[error("truncated file: {context}")]
    TruncatedFile { context: &'static str },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("subset of {requested} requested but only {available} vectors available")]
    SubsetTooLarge { requested: usize, available: usize },

    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    #[error("schema violation: {0}")]
    SchemaViolation(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("config: {0}")]
    Config(#[from] toml::de::Error),
}
