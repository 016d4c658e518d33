use std::path::PathBuf;

use crate::datamodel::Category;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("image error on {path}: {message}")]
    Image { path: PathBuf, message: String },

    #[error("bad header: expected `{expected}`, found `{found}`")]
    BadHeader { expected: String, found: String },

    #[error("{message} at row {row}")]
    Row { row: u64, message: String },

    #[error("duplicate image id `{0}`")]
    DuplicateId(String),

    #[error("image ids differ: missing from predictions [{}], missing from ground truth [{}]", .missing_in_predictions.join(", "), .missing_in_truth.join(", "))]
    IdMismatch {
        missing_in_predictions: Vec<String>,
        missing_in_truth: Vec<String>,
    },

    #[error("row {index} (`{id}`) sums to zero and cannot be normalized")]
    ZeroRow { index: usize, id: String },

    #[error("zero sample count for {}", .0.iter().map(|c| c.as_str()).collect::<Vec<_>>().join(", "))]
    ZeroCount(Vec<Category>),

    #[error("zero prior for {0} which receives nonzero confidence")]
    ZeroPrior(Category),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("content box {box_:?} out of range for a {width}x{height} image")]
    BoxOutOfRange {
        box_: (u32, u32, u32, u32),
        width: u32,
        height: u32,
    },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("backend protocol error: {message} (line: `{line}`)")]
    Protocol { message: String, line: String },

    #[error("backend error: {0}")]
    Backend(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("{0}")]
    Incomplete(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn image(path: impl Into<PathBuf>, err: impl std::fmt::Display) -> Self {
        Error::Image {
            path: path.into(),
            message: err.to_string(),
        }
    }

    pub(crate) fn row(row: u64, message: impl Into<String>) -> Self {
        Error::Row {
            row,
            message: message.into(),
        }
    }
}
