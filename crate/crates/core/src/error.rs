use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the domain of a geometric or link formula.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration value failed validation. `key` is the dotted config path.
    #[error("invalid config value for `{key}`: {reason}")]
    InvalidConfig { key: String, reason: String },

    /// The configuration text could not be parsed.
    #[error("failed to parse config: {0}")]
    Parse(String),

    /// A statistic was requested over an empty sample.
    #[error("empty sample: {0}")]
    Empty(&'static str),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            key: key.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
