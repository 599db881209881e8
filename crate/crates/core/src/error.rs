use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("severity level {0} is outside 1..=10")]
    LevelOutOfRange(i64),

    #[error("unknown degradation kind `{0}`")]
    UnknownKind(String),

    /// Free text that matches no template in the bank.
    #[error("prompt does not match any known template (nearest: `{nearest_id}`: \"{nearest_pattern}\")")]
    PromptParse {
        nearest_id: String,
        nearest_pattern: String,
    },

    #[error("prompts describe one or two degradations, got {0}")]
    UnsupportedArity(usize),

    #[error("cosine similarity is undefined for a zero-norm embedding")]
    UndefinedCosine,

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("image codec error on {}: {source}", path.display())]
    Codec {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("config error: {0}")]
    Config(String),

    /// Synthesis stopped on a write failure; a manifest flagged `partial` was written if possible.
    #[error("synthesis aborted after {written} records ({failed} failed); partial manifest: {}",
        manifest.as_ref().map(|p| p.display().to_string()).unwrap_or_else(|| "<not written>".into()))]
    PartialSynthesis {
        written: usize,
        failed: usize,
        manifest: Option<PathBuf>,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
