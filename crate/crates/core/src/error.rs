use thiserror::Error;

/// Errors produced anywhere in the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// Fleet or class configuration is malformed or unattainable.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The brute-force oracle refuses instances above its size cap.
    #[error("instance too large for exhaustive search: {0}")]
    TooLarge(String),

    /// A classification head cannot represent a count in the sketch.
    #[error("unsupported input: coordinate {coordinate} has count {count}, head supports at most {max}")]
    UnsupportedInput { coordinate: usize, count: u32, max: u32 },

    #[error("training diverged at epoch {epoch}, batch {batch}: loss = {loss}")]
    TrainingDiverged { epoch: usize, batch: usize, loss: f64 },

    /// Binary or textual file content that does not match the expected layout.
    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
