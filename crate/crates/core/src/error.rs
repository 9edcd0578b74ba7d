use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("site {site} outside 1..={sites}")]
    SiteOutOfRange { site: usize, sites: usize },

    #[error("beta = {0} is outside [0, pi]")]
    BetaOutOfRange(f64),

    #[error("gamma = {0} exceeds 2 - sqrt(2); only odd t are admissible")]
    GammaOutOfRange(f64),

    #[error("state space of size {size} exceeds the cap of {cap}")]
    TooLarge { size: String, cap: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("only {0} samples in the fitting window")]
    InsufficientTail(usize),

    #[error("step cap of {0} moves exceeded")]
    StepCap(u64),

    #[error("epoch cap of {0} exceeded")]
    EpochCap(u32),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
