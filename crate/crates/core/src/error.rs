use thiserror::Error;

/// Errors produced across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite coordinate at point {point}, axis {axis}")]
    NonFinite { point: usize, axis: usize },

    #[error("size limit exceeded: {found} points (limit {limit})")]
    SizeLimit { limit: usize, found: usize },

    #[error("class {0} is empty")]
    EmptyClass(&'static str),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("schema error: column {column:?} not found")]
    Schema { column: String },

    #[error("parse error at row {row}, column {column}: {value:?} is not numeric")]
    Parse {
        row: u64,
        column: usize,
        value: String,
    },

    #[error("data error: {0}")]
    Data(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("oracle error: {0}")]
    Oracle(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
