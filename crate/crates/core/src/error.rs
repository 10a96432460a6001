use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside its documented domain.
    #[error("invalid parameter {name}: {reason} (got {value})")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// A caller-side contract was violated (preconditions on data rather
    /// than on scalar parameters).
    #[error("contract violation: {0}")]
    Contract(String),

    /// Rescaling would push energy past the dealiased band.
    #[error("resample aliasing: r = {r} maps {excluded_energy:.3e} of the spectrum beyond the dealias band")]
    ResampleAliasing { r: f64, excluded_energy: f64 },

    /// The feasibility scan found no admissible exponent.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// Malformed on-disk artifact.
    #[error("artifact format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value,
            reason,
        }
    }
}
