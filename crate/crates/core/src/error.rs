use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid pattern: {0}")]
    InvalidPattern(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid conceptor: {0}")]
    InvalidConceptor(String),

    #[error("signal of length {len} is not longer than washout {washout}")]
    TooShort { len: usize, washout: usize },

    #[error("zero spectral radius after {0} draws")]
    DegenerateReservoir(usize),

    #[error("mixing coefficients sum to {0}, expected 1")]
    CoefficientSum(f64),

    #[error("memory exhausted: quota {quota:.4} (would be {would_be:.4} after storing)")]
    MemoryExhausted { quota: f64, would_be: f64 },

    #[error("unstable run at step {step}")]
    Unstable { step: usize },

    #[error("reference signal has zero variance")]
    ZeroVariance,

    #[error("duplicate class label `{0}`")]
    DuplicateLabel(String),

    #[error("class `{0}` has no usable states")]
    EmptyClass(String),

    #[error("no stable autofocus run: {0}")]
    AutofocusFailed(String),

    #[error("unknown demo `{0}`")]
    UnknownDemo(String),

    #[error("unknown pattern `{0}`")]
    UnknownPattern(String),

    #[error("unsupported format version {0}")]
    Version(u32),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
