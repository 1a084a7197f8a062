use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the domain of the model.
    #[error("{name} = {value:e} is out of domain: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("insufficient data: need at least {needed} points, got {got}")]
    InsufficientData { needed: usize, got: usize },
    /// Shape or consistency problem with array inputs.
    #[error("invalid input: {0}")]
    Invalid(&'static str),
    #[error("numerical failure in {what}: estimate {estimate:e} missed tolerance {tolerance:e}")]
    Numerical {
        what: &'static str,
        estimate: f64,
        tolerance: f64,
    },
    /// Oscillation amplitude not resolvable above the noise floor.
    #[error("low visibility: spectral peak ratio {ratio:.3} below threshold {threshold:.3}")]
    LowVisibility { ratio: f64, threshold: f64 },
    #[error("{what} unreachable within [{lo:e}, {hi:e}]")]
    OutOfRange {
        what: &'static str,
        lo: f64,
        hi: f64,
    },
}

impl Error {
    /// Name of the offending parameter, when the error carries one.
    pub fn parameter(&self) -> Option<&'static str> {
        match self {
            Error::Domain { name, .. } => Some(name),
            _ => None,
        }
    }
}

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && !value.is_nan() {
        Ok(value)
    } else {
        Err(Error::Domain {
            name,
            value,
            reason: "must be positive",
        })
    }
}

pub(crate) fn non_negative(name: &'static str, value: f64) -> Result<f64> {
    if value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::Domain {
            name,
            value,
            reason: "must be non-negative",
        })
    }
}
