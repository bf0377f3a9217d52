//! Crate-wide error type.

use std::path::PathBuf;

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A configuration value failed validation. Names the offending field.
    #[error("invalid configuration: field `{field}`: {reason}")]
    InvalidConfig { field: String, reason: String },

    /// An argument to a statistical routine was unusable.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Both input series to a correlation were required to vary but did not.
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// A pre-distortion target fell outside the invertible range.
    #[error("saturation at symbol {symbol_index}: target outside the modulator's invertible range")]
    Saturation { symbol_index: usize },

    /// An iterative numeric routine failed to converge.
    #[error("numeric failure: {context} (after {iterations} iterations)")]
    NonConvergence { context: String, iterations: usize },

    /// Unknown sweep axis; lists the accepted names.
    #[error("unknown sweep axis `{given}`; valid axes: {}", valid.join(", "))]
    UnknownAxis { given: String, valid: Vec<String> },

    /// A config-file line could not be interpreted.
    #[error("config parse error at line {line}: {reason}")]
    ConfigParse { line: usize, reason: String },

    /// A chain stage failed; carries the stage name for diagnostics.
    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    /// Filesystem failure, annotated with the path involved.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn invalid_config(field: &str, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.to_string(),
            reason: reason.into(),
        }
    }

    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
