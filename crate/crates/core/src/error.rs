use std::path::PathBuf;

use thiserror::Error;

/// Errors raised while configuring or executing a simulation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("knowledge base parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("no document matches query {query:?}")]
    NoMatch { query: String },

    #[error("document {name} is a {found}, expected a {expected}")]
    WrongKind {
        name: String,
        found: &'static str,
        expected: &'static str,
    },

    #[error("experiment error: {0}")]
    Experiment(String),

    #[error("chart error: {0}")]
    Chart(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error in {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad user input rather than runtime failures.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::Parse { .. } | Error::Json { .. } | Error::WrongKind { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
