use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("{context}, line {line}: {message}")]
    Parse {
        context: String,
        line: usize,
        message: String,
    },

    #[error("invalid schema: {0}")]
    Schema(String),

    #[error("header does not match schema: {0}")]
    HeaderMismatch(String),

    #[error("row {row}, column {column}: unknown category label {label:?}")]
    UnknownCategory {
        row: usize,
        column: String,
        label: String,
    },

    #[error("row {row}, column {column}: missing value")]
    MissingValue { row: usize, column: String },

    #[error("unknown variable {0:?}")]
    UnknownVariable(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("arc {from} -> {to} would create a directed cycle")]
    Cycle { from: String, to: String },

    #[error("invalid arc {from} -> {to}: {reason}")]
    InvalidArc {
        from: String,
        to: String,
        reason: &'static str,
    },

    #[error("graphs are defined over different node sets")]
    NodeSetMismatch,

    #[error("no strength available for arc {from} -> {to}")]
    MissingStrength { from: String, to: String },

    #[error("design matrix is rank deficient; collinear columns: {}", columns.join(", "))]
    RankDeficient { columns: Vec<String> },

    #[error("all weights are zero; nothing to normalize")]
    AllZeroWeights,

    #[error("weight keys do not match score columns: {0}")]
    KeyMismatch(String),

    #[error("group sets differ across schemes: {0}")]
    GroupMismatch(String),

    #[error("{algorithm}: {source}")]
    Learner {
        algorithm: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(context: impl Into<String>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            context: context.into(),
            line,
            message: message.into(),
        }
    }

    /// True for errors caused by the content of user-supplied inputs
    /// (data, schema, constraint, weight or network files).
    pub fn is_data_error(&self) -> bool {
        match self {
            Error::Io { .. }
            | Error::Csv(_)
            | Error::Parse { .. }
            | Error::Schema(_)
            | Error::HeaderMismatch(_)
            | Error::UnknownCategory { .. }
            | Error::MissingValue { .. }
            | Error::UnknownVariable(_)
            | Error::RankDeficient { .. }
            | Error::AllZeroWeights
            | Error::KeyMismatch(_)
            | Error::GroupMismatch(_)
            | Error::MissingStrength { .. } => true,
            Error::Learner { source, .. } => source.is_data_error(),
            _ => false,
        }
    }
}
