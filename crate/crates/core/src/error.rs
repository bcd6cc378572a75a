use thiserror::Error;

use crate::capacity::EventMask;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("outcome space must have between 1 and {max} outcomes, got {n}")]
    SpaceSize { n: usize, max: usize },

    #[error("duplicate outcome label `{0}`")]
    DuplicateLabel(String),

    #[error("operation supports at most {max} outcomes, got {n}")]
    SpaceTooLarge { n: usize, max: usize },

    #[error("expected {expected} values, got {got}")]
    WrongLength { expected: usize, got: usize },

    #[error("objects live on different outcome spaces")]
    SpaceMismatch,

    #[error("capacity is not normalized: v(empty) = {empty}, v(all) = {full}")]
    NotNormalized { empty: f64, full: f64 },

    #[error("capacity value {value} at {event} is outside [0, 1]")]
    OutOfUnitRange { event: EventMask, value: f64 },

    #[error("capacity is not monotone: v({smaller}) = {small_value} > v({larger}) = {large_value}")]
    NotMonotone {
        smaller: EventMask,
        larger: EventMask,
        small_value: f64,
        large_value: f64,
    },

    #[error("capacity is not 2-alternating: violated at ({0}, {1})")]
    NotTwoAlternating(EventMask, EventMask),

    #[error("invalid probability vector: {0}")]
    InvalidProbability(String),

    #[error("invalid functional: {0}")]
    InvalidFunctional(String),

    #[error("parameter `{name}` = {value} is out of range {range}")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("empty family")]
    EmptyFamily,

    #[error("invalid likelihood set: {0}")]
    InvalidLikelihood(String),

    #[error("the core of the capacity is empty")]
    InfeasibleCore,

    #[error("posterior ratio undefined for event {event}: denominator {denominator}")]
    UndefinedRatio { event: EventMask, denominator: f64 },

    #[error("zero evidence: the prior gives the observation probability 0")]
    ZeroEvidence,

    #[error("every (prior vertex, likelihood) pair has zero evidence")]
    AllZeroEvidence,

    #[error("the likelihood set does not contain its bang-bang likelihoods; posterior values would only be bounds")]
    EnvelopesNotMembers,

    #[error("theorem chain violated: {0}")]
    ChainViolation(String),

    #[error("posterior lost 2-alternation: {0}")]
    ConcavityLost(String),

    #[error("simplex did not terminate within {0} pivots")]
    PivotLimit(usize),

    #[error("model error at `{path}`: {message}")]
    Model { path: String, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn model(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Model {
            path: path.into(),
            message: message.into(),
        }
    }
}
