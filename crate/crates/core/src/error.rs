use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dyadic cube enumeration would visit {requested} cubes (cap {cap})")]
    CapExceeded { requested: u128, cap: u64 },

    #[error("normalizer must be positive, got {0}")]
    NonpositiveNormalizer(f64),

    #[error("no unmasked sample lies in the domain")]
    EmptyDomain,

    #[error("ball around the evaluation point contains no samples")]
    DegenerateBall,

    #[error("oscillation mode {mode} cannot be used with v = {v}")]
    ModeMismatch { mode: &'static str, v: f64 },

    #[error("difference node {0:?} is masked or off the grid")]
    OutOfDomain(Vec<i64>),

    #[error("no dyadic scale between the resolution floor {floor} and T = {ceiling}")]
    ScaleRangeEmpty { floor: f64, ceiling: f64 },

    #[error("grid Nyquist frequency {nyquist} cannot resolve k_max = {k_max}")]
    NyquistTooLow { nyquist: f64, k_max: u32 },

    #[error("regularity scan needs at least {needed} scales, got {got}")]
    InsufficientScales { needed: usize, got: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration error at {location}: {message}")]
    Config { location: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn config(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config { location: location.into(), message: message.into() }
    }
}
