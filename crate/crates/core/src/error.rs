use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0}")]
    Config(ConfigIssues),

    #[error("invalid argument `{name}`: {message}")]
    InvalidArgument { name: &'static str, message: String },

    #[error("frequency {frequency_hz} Hz outside absorption table range [{lo_hz}, {hi_hz}] Hz")]
    OutOfTableRange { frequency_hz: f64, lo_hz: f64, hi_hz: f64 },

    #[error("quadrature did not converge: estimate {estimate}, error {error} after {intervals} intervals")]
    Quadrature {
        estimate: f64,
        error: f64,
        intervals: usize,
    },

    #[error(
        "spectral resolution {bin_hz} Hz exceeds the required {required_hz} Hz; use at least {min_samples} samples"
    )]
    InsufficientResolution {
        bin_hz: f64,
        required_hz: f64,
        min_samples: usize,
    },

    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("worker pool: {0}")]
    Pool(String),
}

impl Error {
    pub(crate) fn config(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config(ConfigIssues(vec![FieldIssue {
            pointer: pointer.into(),
            message: message.into(),
        }]))
    }

    pub(crate) fn arg(name: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidArgument {
            name,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by user input rather than by the run itself.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::InvalidArgument { .. }
                | Error::OutOfTableRange { .. }
                | Error::UnknownExperiment(_)
                | Error::Json(_)
        )
    }
}

/// One rejected config field. `pointer` is an RFC 6901 JSON pointer into the
/// config document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldIssue {
    pub pointer: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConfigIssues(pub Vec<FieldIssue>);

impl ConfigIssues {
    pub(crate) fn push(&mut self, pointer: &str, message: impl Into<String>) {
        self.0.push(FieldIssue {
            pointer: pointer.to_string(),
            message: message.into(),
        });
    }

    pub fn pointers(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(|i| i.pointer.as_str())
    }

    pub(crate) fn into_result(self) -> Result<()> {
        if self.0.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(self))
        }
    }
}

impl std::fmt::Display for ConfigIssues {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "invalid config:")?;
        for issue in &self.0 {
            write!(f, "\n  {}: {}", issue.pointer, issue.message)?;
        }
        Ok(())
    }
}
