use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("matrix has a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("shift {lambda} is resonant with the spectrum (distance {distance:e})")]
    Resonant { lambda: f64, distance: f64 },

    #[error("QL iteration failed to converge for eigenvalue {index}")]
    NoConvergence { index: usize },

    #[error("dimension mismatch: {0}")]
    Shape(String),

    #[error("empty input: {0}")]
    Empty(&'static str),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for failures of the numerical kernels rather than of the inputs.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::NoConvergence { .. } | Error::Resonant { .. })
    }
}
