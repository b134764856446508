use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied parameter is out of range or inconsistent.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// Matrix/vector shapes do not line up.
    #[error("dimension mismatch: {context} (expected {expected}, got {actual})")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    /// An input column (or residual) is numerically degenerate.
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// The label vector does not contain both classes.
    #[error("labels must contain both classes (0 and 1)")]
    SingleClassLabels,

    /// A metric has no defined value for the given inputs.
    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    /// Problems reading or interpreting an input file.
    #[error("input error: {0}")]
    Input(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-parseable category used by the CLI's one-line failures.
    pub fn category(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "parameter",
            Error::DimensionMismatch { .. } => "parameter",
            Error::SingleClassLabels => "parameter",
            Error::DegenerateInput(_) => "degenerate",
            Error::UndefinedMetric(_) => "metric",
            Error::Input(_) => "input",
            Error::Io(_) => "io",
            Error::Csv(_) => "input",
            Error::Json(_) => "input",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
