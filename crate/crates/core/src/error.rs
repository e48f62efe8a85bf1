use thiserror::Error;

/// Errors raised by the lab's operations.
///
/// Every variant maps onto a stable integer code so that the C ABI and the
/// CLI can report failures without string matching.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point {0} lies outside the admissible sector")]
    OutsideSector(String),

    #[error("spectral collision: |lambda_j - z^m| = {distance:e} below {threshold:e}")]
    SpectralCollision { distance: f64, threshold: f64 },

    #[error("cutoff proximity: window [{lo}, {hi}] reaches within 1 of cutoff {cutoff}")]
    CutoffProximity { lo: f64, hi: f64, cutoff: f64 },

    #[error("model has no eigenfunctions")]
    NoEigenfunctions,

    #[error("model has no symbol")]
    NoSymbol,

    #[error("quadrature did not converge: estimated error {achieved:e}, requested {requested:e}")]
    QuadratureNonConvergence { achieved: f64, requested: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl LabError {
    /// Stable numeric code, shared with the C ABI.
    pub fn code(&self) -> i32 {
        match self {
            LabError::InvalidParameter(_) => 1,
            LabError::OutsideSector(_) => 2,
            LabError::SpectralCollision { .. } => 3,
            LabError::CutoffProximity { .. } => 4,
            LabError::NoEigenfunctions => 5,
            LabError::NoSymbol => 6,
            LabError::QuadratureNonConvergence { .. } => 7,
            LabError::Parse(_) => 8,
            LabError::Io(_) => 9,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        LabError::InvalidParameter(msg.into())
    }
}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
