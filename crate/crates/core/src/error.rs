use thiserror::Error;

/// Errors produced by the geometry, dynamics, transport and experiment layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("point at distance {distance} is outside the reach tube (reach {reach})")]
    OutsideReachTube { distance: f64, reach: f64 },

    #[error("closest point is not unique at distance {distance}")]
    AmbiguousProjection { distance: f64 },

    #[error("point at distance {distance} does not lie on the domain")]
    NotOnDomain { distance: f64 },

    #[error("invalid resolution {0}: expected an even number >= 8")]
    InvalidResolution(usize),

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("non-finite particle state at step {step}")]
    NonFiniteState { step: usize },

    #[error("linesearch failed after {halvings} halvings")]
    LinesearchFailed { halvings: usize },

    #[error("initial sampler produced no particles")]
    EmptySample,

    #[error("measure sizes differ: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("brute-force transport limited to {max} atoms, got {n}")]
    SizeTooLarge { n: usize, max: usize },

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("unknown figure id `{0}`")]
    UnknownFigure(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::OutsideReachTube { .. } => "OutsideReachTube",
            Error::AmbiguousProjection { .. } => "AmbiguousProjection",
            Error::NotOnDomain { .. } => "NotOnDomain",
            Error::InvalidResolution(_) => "InvalidResolution",
            Error::InvalidDomain(_) => "InvalidDomain",
            Error::InvalidPotential(_) => "InvalidPotential",
            Error::InvalidPoint(_) => "InvalidPoint",
            Error::NonFiniteState { .. } => "NonFiniteState",
            Error::LinesearchFailed { .. } => "LinesearchFailed",
            Error::EmptySample => "EmptySample",
            Error::SizeMismatch { .. } => "SizeMismatch",
            Error::SizeTooLarge { .. } => "SizeTooLarge",
            Error::InvalidSweep(_) => "InvalidSweep",
            Error::UnknownFigure(_) => "UnknownFigure",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::Io(_) => "Io",
            Error::Parse(_) => "Parse",
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
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
