use thiserror::Error;

/// Errors raised by the rate, spectral, simulation and analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dynamics `{0}` has no linear drift representation")]
    UnsupportedDynamics(String),

    #[error("norm curve never dropped below the threshold within the horizon t = {horizon}")]
    NoCrossing { horizon: f64 },

    #[error("noise covariance is not positive definite (Cholesky failed after regularisation)")]
    NonPsd,

    #[error("squared density ratio is not integrable: 2 cov^-1 - target_cov^-1 is not positive definite")]
    NotSquareIntegrable,

    #[error("averaging window [{start}, {end}] is not covered by the time grid")]
    WindowOutOfRange { start: f64, end: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("thinning proposal rate {rate} exceeds its envelope {bound} (bad user bound)")]
    EnvelopeViolation { rate: f64, bound: f64 },

    #[error("scheme {scheme} is incompatible with dynamics {kind}")]
    IncompatibleScheme { scheme: String, kind: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("format error: {0}")]
    Format(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Format(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite and > 0, got {value}")))
    }
}
