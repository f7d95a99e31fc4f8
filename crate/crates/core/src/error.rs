//! Crate-wide error type.

use crate::taxonomy::TaskLevel;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown label {raw:?} at level {level}")]
    UnknownLabel { raw: String, level: TaskLevel },

    #[error("malformed row at line {line}: {reason}")]
    MalformedRow { line: u64, reason: String },

    #[error("duplicate id {0:?}")]
    DuplicateId(String),

    #[error("example {id:?} has empty text")]
    EmptyText { id: String },

    #[error("example {id:?} has inconsistent labels: {detail}")]
    InconsistentLabels { id: String, detail: String },

    #[error("class {0:?} has zero count; weights undefined")]
    EmptyClass(String),

    #[error("class {0:?} has too few examples for a stratified split")]
    TooFewExamples(String),

    #[error("invalid fold count {k} for {n} examples (need 2 <= k <= n)")]
    InvalidK { k: usize, n: usize },

    #[error("cannot fit idf weights on an empty corpus")]
    EmptyCorpus,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("prediction sets are not aligned: {0}")]
    Misaligned(String),

    #[error("weight vector has {got} entries for {expected} prediction sets")]
    WeightLengthMismatch { expected: usize, got: usize },

    #[error("invalid grid step {0}: must divide 1 evenly")]
    InvalidStep(f64),

    #[error("length mismatch: truth has {truth} labels, predictions have {predicted}")]
    LengthMismatch { truth: usize, predicted: usize },

    #[error("corrupt model file: {0}")]
    CorruptModel(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
