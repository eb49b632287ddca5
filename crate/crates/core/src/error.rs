use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A corpus record that does not follow the tagged newswire layout.
    #[error("corpus parse error at byte {offset} (last good doc_id: {}): {message}", fmt_last_id(.last_good_id))]
    Parse {
        offset: usize,
        last_good_id: Option<u32>,
        message: String,
    },

    #[error("lexicon format error at line {line}: {message}")]
    Lexicon { line: usize, message: String },

    #[error("document {doc_id} is labeled with undeclared category `{category}`")]
    UnknownCategory { doc_id: u32, category: String },

    /// The data is readable but cannot be evaluated (e.g. an empty test
    /// split).
    #[error("evaluation failed: {0}")]
    Evaluation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("model format error: {0}")]
    ModelFormat(String),

    #[error("score file error at line {line}: {message}")]
    ScoreFormat { line: usize, message: String },

    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn fmt_last_id(id: &Option<u32>) -> String {
    match id {
        Some(id) => id.to_string(),
        None => "none".to_string(),
    }
}

impl Error {
    /// Process exit code: 1 for evaluation-level failures, 2 for I/O and
    /// usage errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Evaluation(_) => 1,
            _ => 2,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
