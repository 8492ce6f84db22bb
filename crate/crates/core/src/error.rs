use thiserror::Error;

/// Errors raised by the laboratory. Every variant names the offending
/// parameter or grid quantity so a caller can report it verbatim.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("power weight |x|^{alpha} is not integrable on cell {cell} touching the origin")]
    SingularCell { alpha: f64, cell: usize },

    #[error("weight vanishes on cell {cell}; constant undefined")]
    ZeroWeight { cell: usize },

    #[error("weight has zero average on interval [{0}, {1}]")]
    ZeroAverage(usize, usize),

    #[error("denominator weight vanishes on cell {cell}")]
    ZeroDenominator { cell: usize },

    #[error("exponent mismatch: sum of 1/q_j = {sum}, expected 1/q = {expected}")]
    ExponentMismatch { sum: f64, expected: f64 },

    #[error("every probe had zero norm")]
    DegenerateProbe,

    #[error("series diverges: term ratio {ratio} exceeds {rho} at term {term}")]
    Divergence { term: usize, ratio: f64, rho: f64 },

    #[error("function has zero mass; no root exists")]
    ZeroMass,

    #[error("resolution too coarse: dx = {dx} exceeds {limit}")]
    ResolutionTooCoarse { dx: f64, limit: f64 },

    #[error("{0}")]
    Io(String),
}

impl Error {
    pub fn param(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }

    /// True for failures of the numerics themselves (as opposed to bad input).
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Divergence { .. }
                | Error::ZeroMass
                | Error::ZeroAverage(..)
                | Error::ZeroDenominator { .. }
                | Error::DegenerateProbe
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
