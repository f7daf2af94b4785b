use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("travel time tau_{index} = {value} must be strictly positive")]
    NonPositiveTau { index: usize, value: f64 },

    #[error("tail travel time {0} must be non-negative")]
    NegativeTailTau(f64),

    #[error("reflection coefficient R_{index} = {value} is outside (-1, 1)")]
    ReflectionOutOfRange { index: usize, value: f64 },

    #[error("length mismatch: {taus} travel times but {reflections} reflection coefficients")]
    LengthMismatch { taus: usize, reflections: usize },

    #[error("a medium needs at least one layer (M >= 1), got M = {0}")]
    TooFewLayers(usize),

    #[error("invalid physical profile: {0}")]
    InvalidProfile(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("multi-index binomial undefined: {0}")]
    Domain(String),

    #[error("invalid transit vector: {0}")]
    InvalidTransitVector(String),

    #[error("index {index} out of range for {len} interfaces")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("lattice recursion needs equal layer travel times, tau_{index} = {value} differs from tau_0 = {expected}")]
    UnequalTaus { index: usize, value: f64, expected: f64 },

    #[error("invalid scattering sequence: {0}")]
    InvalidSequence(String),

    #[error("scattering sequence enumeration exceeded the limit of {0} sequences")]
    SequenceLimit(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
