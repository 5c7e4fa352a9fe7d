//! Error type shared across the crate.
//!
//! Variants are grouped by failure class so the CLI can map them to distinct
//! exit codes: configuration problems, missing/incompatible artifacts,
//! numeric failures during training, and everything else.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Error, Debug)]
pub enum Error {
    /// Invalid configuration: unknown key, unparseable value, or a failed
    /// validation rule. The message names the offending key.
    #[error("config error: {0}")]
    Config(String),

    /// A tensor or grid arrived with the wrong shape.
    #[error("shape error in {context}: expected {expected}, got {got}")]
    Shape {
        context: String,
        expected: String,
        got: String,
    },

    /// Checkpoint problems: missing prerequisite stage, version mismatch,
    /// or a corrupt container.
    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    /// Training produced a non-finite loss or parameters.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Dataset problems: invalid specs, missing frames, bad manifest.
    #[error("dataset error: {0}")]
    Data(String),

    /// Filesystem failure, annotated with the path that caused it.
    #[error("io error at {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// Error bubbled up from the tensor backend.
    #[error(transparent)]
    Tensor(#[from] candle_core::Error),
}

impl Error {
    /// Attach a path to an `std::io::Error`.
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Shorthand for shape mismatches.
    pub fn shape(
        context: impl Into<String>,
        expected: impl std::fmt::Debug,
        got: impl std::fmt::Debug,
    ) -> Self {
        Error::Shape {
            context: context.into(),
            expected: format!("{expected:?}"),
            got: format!("{got:?}"),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
