use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate correlation: {0}")]
    DegenerateCorrelation(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("degenerate channel: main channel vector is zero")]
    DegenerateChannel,

    #[error("no null space: a single transmit antenna leaves nowhere to send artificial noise")]
    NoNullSpace,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported dimension: N_t = {n} exceeds the configured cap of {cap}")]
    UnsupportedDimension { n: usize, cap: usize },

    #[error("Monte Carlo budget too small: {trials} trials, at least {min} required")]
    Budget { trials: usize, min: usize },

    #[error("outage series diverged: raw value {raw} (increase the truncation K)")]
    SeriesDivergence { raw: f64 },

    #[error("non-finite special function value at F(n={n}, p={p}, x={x})")]
    Numeric { n: i64, p: f64, x: f64 },

    #[error("scenario error: {0}")]
    Scenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
