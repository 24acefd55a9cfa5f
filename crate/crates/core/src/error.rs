use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report.
///
/// The variants are grouped by the module that raises them; [`Error::code`]
/// gives a stable machine-readable tag for each one.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("invalid angle {psi}: expected a half-angle in {range}")]
    InvalidAngle { psi: f64, range: &'static str },
    #[error("integrand is not finite at contour point {point}")]
    SingularityOnPath { point: Complex64 },
    #[error("quadrature did not converge: best estimate {best} with error {estimate:e}")]
    NoConvergence { best: Complex64, estimate: f64 },
    #[error("function nearly vanishes on the contour (min |f| = {min:e}, max |f| = {max:e}) near {near}")]
    ZeroOnBoundary { min: f64, max: f64, near: Complex64 },

    #[error("degenerate function: {0}")]
    DegenerateFunction(String),
    #[error("point {point} is outside the domain: {reason}")]
    OutsideDomain { point: Complex64, reason: String },
    #[error("invalid contour: {0}")]
    InvalidContour(String),
    #[error("invalid function data: {0}")]
    InvalidFunction(String),

    #[error("pole of {symbol} at {at}")]
    Pole { symbol: String, at: Complex64 },
    #[error("radius {radius} too large: must stay below {limit}")]
    RadiusTooLarge { radius: f64, limit: f64 },
    #[error("invalid coefficient sequence: {0}")]
    InvalidSequence(String),

    #[error("zero scan failed: {0}")]
    ScanFailure(String),
    #[error("zero catalog incomplete: {0}")]
    IncompleteCatalog(String),
    #[error("certification failed at {at}: {reason}")]
    CertificationFailure { at: Complex64, reason: String },
    #[error("catalog is stale: {0}")]
    StaleCatalog(String),

    #[error("no admissible contour: singularity {singularity} {reason}")]
    DomainObstruction { singularity: Complex64, reason: String },
    #[error("series hypothesis violated: singularity at distance {distance} outside Taylor disc of radius {radius}")]
    DiscViolation { distance: f64, radius: f64 },
    #[error("contour pinched by zero of the symbol near {zero}")]
    Pinch { zero: Complex64 },
    #[error("zero {at} is not certified: {reason}")]
    CertificationRequired { at: Complex64, reason: String },
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("source normalization: {0}")]
    Normalization(String),
    #[error("zero {tau} has multiplicity {multiplicity}; only simple zeros are supported")]
    MultiplicityUnsupported { tau: Complex64, multiplicity: u32 },
    #[error("r schedule exhausted without meeting tolerance {tol:e}; last gap {last_gap:e}")]
    ScheduleExhausted { tol: f64, last_gap: f64, values: Vec<Complex64> },
    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable identifier used in machine-readable error reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidGeometry(_) => "invalid-geometry",
            Error::InvalidAngle { .. } => "invalid-angle",
            Error::SingularityOnPath { .. } => "singularity-on-path",
            Error::NoConvergence { .. } => "no-convergence",
            Error::ZeroOnBoundary { .. } => "zero-on-boundary",
            Error::DegenerateFunction(_) => "degenerate-function",
            Error::OutsideDomain { .. } => "outside-domain",
            Error::InvalidContour(_) => "invalid-contour",
            Error::InvalidFunction(_) => "invalid-function",
            Error::Pole { .. } => "pole",
            Error::RadiusTooLarge { .. } => "radius-too-large",
            Error::InvalidSequence(_) => "invalid-sequence",
            Error::ScanFailure(_) => "scan-failure",
            Error::IncompleteCatalog(_) => "incomplete-catalog",
            Error::CertificationFailure { .. } => "certification-failure",
            Error::StaleCatalog(_) => "stale-catalog",
            Error::DomainObstruction { .. } => "domain-obstruction",
            Error::DiscViolation { .. } => "disc-violation",
            Error::Pinch { .. } => "pinch",
            Error::CertificationRequired { .. } => "certification-required",
            Error::Shape(_) => "shape",
            Error::Normalization(_) => "normalization",
            Error::MultiplicityUnsupported { .. } => "multiplicity-unsupported",
            Error::ScheduleExhausted { .. } => "schedule-exhausted",
            Error::Unsupported(_) => "unsupported",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}
