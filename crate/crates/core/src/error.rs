use thiserror::Error;

/// Errors produced by tensor algebra, graph construction, solvers and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("mode {mode} out of range for a tensor of order {order}")]
    ModeOutOfRange { mode: usize, order: usize },
    #[error("rank mismatch: {0}")]
    Rank(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("degenerate data: {0}")]
    Degenerate(String),
    #[error("input tensor has {count} negative entries (first at flat index {first})")]
    NegativeInput { count: usize, first: usize },
    #[error("non-finite value produced while updating core {core}")]
    NonFinite { core: usize },
    #[error("invalid tensor file: {0}")]
    Format(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable snake_case tag for machine-readable reporting.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Shape(_) => "shape",
            Error::ModeOutOfRange { .. } => "mode_out_of_range",
            Error::Rank(_) => "rank",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Degenerate(_) => "degenerate",
            Error::NegativeInput { .. } => "negative_input",
            Error::NonFinite { .. } => "non_finite",
            Error::Format(_) => "format",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}
