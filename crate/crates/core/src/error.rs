use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Error)]
pub enum MregError {
    /// A parameter lies outside the range where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// Shapes, grids or windows do not fit together.
    #[error("structural error: {0}")]
    Structural(String),
    /// Input data violates a stated bound (non-finite samples, ellipticity, symmetry).
    #[error("data error: {0}")]
    Data(String),
    /// The form is not coercive even after the largest admissible shift.
    #[error("form is not quasi-coercive: best coercivity {best_eta:e} at shift {omega:e}")]
    NotQuasiCoercive { best_eta: f64, omega: f64 },
    /// A solver or decomposition failed to reach its tolerance.
    #[error("numerical failure: {message}")]
    Numerical {
        message: String,
        residual_history: Vec<f64>,
    },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, MregError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(MregError::Domain(msg.into()))
}

pub(crate) fn structural<T>(msg: impl Into<String>) -> Result<T> {
    Err(MregError::Structural(msg.into()))
}
