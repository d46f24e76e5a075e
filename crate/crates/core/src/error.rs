use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An arm or problem parameter outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A quantity that is mathematically undefined for the given instance.
    #[error("domain error: {0}")]
    Domain(String),

    /// Horizon too small for the requested policy.
    #[error("{0}")]
    Budget(String),

    #[error("unknown preset: {0}")]
    UnknownPreset(String),

    #[error("unknown policy: {0}")]
    UnknownPolicy(String),

    /// Not enough usable points to fit a curve.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Io(err.to_string())
    }
}
