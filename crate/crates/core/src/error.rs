use thiserror::Error;

/// Errors produced by the simulation and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("a ring network needs at least 2 parties, got {0}")]
    TooFewParties(usize),

    #[error("{parties} parties exceeds the supported maximum of {max}")]
    TooManyParties { parties: usize, max: usize },

    #[error("dimension mismatch: state has {state} modes, transform acts on {transform}")]
    DimensionMismatch { state: usize, transform: usize },

    #[error("transform is not unitary (max entrywise deviation {0:e})")]
    NotUnitary(f64),

    #[error("invalid occupation vector: {0}")]
    InvalidOccupation(String),

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    /// The projection onto one particle per station is the zero vector.
    #[error("post-selection impossible: no amplitude has exactly one particle per station")]
    PostSelectionImpossible,

    #[error("state has support outside the one-particle-per-station subspace")]
    NotPostSelected,

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid bitstring {0:?}")]
    InvalidBitstring(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// Neither the all-clockwise nor the all-counterclockwise routing can occur.
    #[error("post-selection impossible: routing never delivers one particle per station")]
    DegenerateRouting,

    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
