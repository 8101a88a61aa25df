use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{quantity} = {value} is outside the valid range {range}")]
    Domain {
        quantity: &'static str,
        value: f64,
        range: String,
    },

    #[error("singular configuration: {0}")]
    Singular(String),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid parameters: {}", .0.join("; "))]
    Validation(Vec<String>),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate optimum: {0}")]
    DegenerateOptimum(String),

    #[error("no catalog entry fits within {max_diameter} mm outer diameter")]
    NoCatalogFit { max_diameter: f64 },

    #[error("no contact within {travel} mm of travel")]
    NoContact { travel: f64 },

    #[error("hole not found within search radius {bound} mm after {steps} spiral steps")]
    HoleNotFound { bound: f64, steps: usize },

    #[error("insertion timed out after {steps} steps ({time} s)")]
    Timeout { steps: usize, time: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(quantity: &'static str, value: f64, range: impl Into<String>) -> Self {
        Error::Domain {
            quantity,
            value,
            range: range.into(),
        }
    }
}
