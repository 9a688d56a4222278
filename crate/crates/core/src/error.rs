use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("z = {z} outside trajectory segment [{z_start}, {z_end}]")]
    OutsideSegment { z: f64, z_start: f64, z_end: f64 },

    #[error("tangent-intercept map is not monotone over the segment; trajectory not realizable as a single-valued caustic from this aperture")]
    NonMonotoneTangency,

    #[error("aperture point {xi} outside the image [{lo}, {hi}] of the tangent-intercept map")]
    OutsideTangentImage { xi: f64, lo: f64, hi: f64 },

    #[error("no overlap between the tangent-intercept image [{lo}, {hi}] and the aperture [0, {aperture}]")]
    EmptyApertureOverlap { lo: f64, hi: f64, aperture: f64 },

    #[error("receiver at ({x}, {z}) coincides with array element {index}")]
    ReceiverOnElement { x: f64, z: f64, index: usize },

    #[error("threshold {gamma} unattainable: focused intensity {intensity} at z = {z} is below it")]
    ThresholdUnattainable { gamma: f64, intensity: f64, z: f64 },

    #[error("superposed focal weights cancel (norm {norm:.3e} < 1e-9)")]
    ZeroSumCancellation { norm: f64 },

    #[error("scenario: {0}")]
    Scenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Coarse classification used by the CLI to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad input: invalid scenario, config or argument (exit code 2).
    Validation,
    /// Numerical failure: non-monotone tangency, unattainable threshold, ... (exit code 3).
    Numerical,
    /// I/O failure (exit code 3).
    Io,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidConfig(_) | Error::Domain(_) | Error::Scenario(_) => {
                ErrorKind::Validation
            }
            Error::Io(_) => ErrorKind::Io,
            _ => ErrorKind::Numerical,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
