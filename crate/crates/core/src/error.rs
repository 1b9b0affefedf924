use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller broke an operation's precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("incompatible input: expected dimension {expected}, got {found}")]
    IncompatibleInput { expected: usize, found: usize },

    #[error("incompatible task: model has {expected} classes, task has {found}")]
    IncompatibleClasses { expected: usize, found: usize },

    #[error("training diverged at epoch {epoch}: non-finite loss or weights")]
    TrainingDiverged { epoch: usize },

    /// The learner holds no representation it can compare the query against.
    #[error("no compatible knowledge for a {dim}-dimensional query{}", scope_suffix(.task_tag))]
    NoCompatibleKnowledge {
        dim: usize,
        task_tag: Option<String>,
    },

    #[error("{path}: line {line}: {message}")]
    Load {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("split: {0}")]
    Split(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn scope_suffix(tag: &Option<String>) -> String {
    match tag {
        Some(t) => format!(" in task '{t}'"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
