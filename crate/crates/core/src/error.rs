use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("curve {0} has no crossings")]
    DegenerateCurve(String),
    #[error("inconsistent ribbon graph: {0}")]
    InconsistentRibbon(String),
    #[error("ribbon graph must be connected")]
    Disconnected,
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("unknown curve {0}")]
    UnknownCurve(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("integer overflow")]
    Overflow,
    #[error("map is not well defined: {0}")]
    NotWellDefined(String),
    #[error("invalid chain at position {index}: {reason}")]
    ChainInvalid { index: usize, reason: String },
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("factorization belongs to model {found}, expected {expected}")]
    ModelMismatch { expected: String, found: String },
    #[error("hypothesis unmet: cores missing from factorization: {}", .0.join(", "))]
    HypothesisUnmet(Vec<String>),
    #[error("product of factorization is not the identity")]
    NotIdentity,
    #[error("could not expose a plain twist on {0} by Hurwitz moves")]
    CertificateIncomplete(String),
    #[error("letter {index} does not preserve the colouring")]
    ColourViolation { index: usize },
    #[error("cannot lift letter: {0}")]
    Unliftable(String),
    #[error("replay failed in entry {entry} at move {step}: {reason}")]
    Replay { entry: usize, step: usize, reason: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
