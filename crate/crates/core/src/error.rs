use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised anywhere in the forecasting pipeline.
#[derive(Error, Debug)]
pub enum Error {
    #[error("series too short: need at least {required} values, got {actual}")]
    SeriesTooShort { required: usize, actual: usize },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid parameter '{name}': {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("no eligible samples left after exclusion")]
    NoEligibleSamples,

    #[error("linear-rescale kernel is degenerate: maximum neighbor distance is zero")]
    DegenerateStats,

    #[error("too few samples: need at least {required}, got {actual}")]
    TooFewSamples { required: usize, actual: usize },

    #[error("empty input vector")]
    EmptyInput,

    #[error("linear system is numerically singular")]
    SingularSystem,

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("zero variance in {0}")]
    ZeroVariance(&'static str),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("missing value at line {line} and gap policy is 'error'")]
    Gap { line: usize },

    #[error("file contains no observations")]
    EmptyFile,

    #[error("unsupported model file version: {0}")]
    VersionMismatch(String),

    #[error("corrupt model file: {0}")]
    CorruptFile(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Coarse grouping used to pick a process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Config,
    Data,
    Numeric,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::InvalidParameter { .. } | Error::Config(_) => ErrorClass::Config,
            Error::SingularSystem
            | Error::ZeroVariance(_)
            | Error::NonFinite(_)
            | Error::DegenerateStats
            | Error::NoEligibleSamples => ErrorClass::Numeric,
            _ => ErrorClass::Data,
        }
    }

    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
