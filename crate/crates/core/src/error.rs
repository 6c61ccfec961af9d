use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// Rejection sampling never produced a free configuration.
    #[error("sampling exhausted after {attempts} consecutive rejections")]
    SamplingExhausted { attempts: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("malformed results file: {0}")]
    MalformedResults(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
