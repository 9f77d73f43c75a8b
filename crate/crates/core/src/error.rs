use std::path::PathBuf;

/// Errors produced by the library.
///
/// The CLI maps these onto exit codes, so the split between variants mirrors
/// the failure categories a caller can meaningfully react to: bad input
/// versus a malformed persisted model versus an internal training failure.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("corpus error: {0}")]
    Corpus(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("empty vocabulary: no term survived the document-frequency threshold")]
    EmptyVocabulary,

    #[error("training failed: {0}")]
    Train(String),

    #[error("model format error: {0}")]
    ModelFormat(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
