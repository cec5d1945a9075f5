use thiserror::Error;

use crate::quadfield::FieldError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// The input is well-formed but the mathematics rejects it.
    Domain,
    /// Malformed or inconsistent input.
    Config,
    /// A broken internal invariant.
    Internal,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("lattice basis is singular")]
    SingularBasis,
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error("window is empty")]
    EmptyWindow,
    #[error("invalid box: {0}")]
    InvalidBox(String),
    #[error("singular parameter: lattice point {coords:?} has internal value {internal} on the window boundary")]
    SingularParameter { coords: Vec<i64>, internal: String },
    #[error("parameter is not singular inside the probe box")]
    NotSingular,
    #[error("ambiguous singular pair: {0} separate boundary orbits inside the box")]
    AmbiguousSingularity(usize),
    #[error("ball of radius {radius} around {center} leaves the sample box")]
    BallExceedsBox { center: String, radius: String },
    #[error("unrealizable patch: {0}")]
    UnrealizablePatch(String),
    #[error("sample too small to localize: achieved intersection {achieved}")]
    SampleTooSmall { achieved: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("too few points: have {have}, need at least {need}")]
    TooFewPoints { have: usize, need: usize },
    #[error("degenerate star spread: least-squares system is singular")]
    DegenerateFit,
    #[error("local rule has no value for a patch class of radius {radius} ({points} points)")]
    MissingPatchClass { radius: String, points: usize },
    #[error("non-positive tile length for letter {0}")]
    NonPositiveLength(String),
    #[error("seed letter {0} does not start its own image")]
    SeedNotSelfStarting(String),
    #[error("invalid substitution: {0}")]
    InvalidSubstitution(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Field(_)
            | Error::Dimension(_)
            | Error::InvalidWindow(_)
            | Error::InvalidBox(_)
            | Error::InvalidSubstitution(_)
            | Error::Config(_) => ErrorKind::Config,
            Error::Internal(_) => ErrorKind::Internal,
            _ => ErrorKind::Domain,
        }
    }
}
