use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("value {value} lies outside the unit interval")]
    Domain { value: f64 },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("empty input")]
    Empty,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("order {order} exceeds the cap of {cap}; the basis transform is too ill-conditioned beyond it")]
    OrderTooLarge { order: usize, cap: usize },

    #[error("design is rank deficient at column {column} (polynomial order {column})")]
    RankDeficient { column: usize },

    #[error("model of order {order} saturates the data (1 - R^2 = {one_minus_r2:e})")]
    Saturated { order: usize, one_minus_r2: f64 },

    #[error("quadrature did not converge after {evaluations} evaluations; worst intervals: {trace}")]
    Quadrature { evaluations: usize, trace: String },

    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error("malformed input at row {row}, column '{column}': {message}")]
    Input {
        row: usize,
        column: String,
        message: String,
    },

    #[error("results file does not match the expected schema: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures caused by the caller's data or arguments rather than
    /// by the numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Domain { .. }
                | Error::NonFinite { .. }
                | Error::Empty
                | Error::Dimension { .. }
                | Error::InvalidArgument(_)
                | Error::Input { .. }
                | Error::Schema(_)
                | Error::Csv(_)
                | Error::Degenerate(_)
        )
    }
}
