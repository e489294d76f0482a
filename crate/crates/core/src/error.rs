use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{name} = {value} is outside its domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("probability {value} is outside [0, 1] beyond tolerance")]
    ProbabilityOutOfRange { value: f64 },

    #[error("optimizer did not converge (residual {residual:e})")]
    NonConvergence { residual: f64 },

    #[error("resolution {n} cannot represent overlap {c}: {reason}")]
    Resolution { n: usize, c: f64, reason: String },

    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Rejects anything that is not a finite number in `[0, 1]`.
pub(crate) fn check_unit(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::Domain {
            name,
            value,
            domain: "[0, 1]",
        })
    }
}
