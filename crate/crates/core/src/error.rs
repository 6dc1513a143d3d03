use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("fields live on different lattices")]
    LatticeMismatch,

    #[error("cutoff {0} is not a shell boundary of the lattice")]
    NotAShellBoundary(f64),

    #[error(
        "mode count {requested} splits a degenerate shell (nearest boundaries {below} and {above})"
    )]
    SplitsShell {
        requested: usize,
        below: usize,
        above: usize,
    },

    #[error("hypothesis failure: {0}")]
    Hypothesis(String),

    #[error("non-finite state at step {step} (t = {time})")]
    NumericAbort { step: u64, time: f64 },

    #[error("step budget of {0} steps exceeded")]
    StepOverflow(u64),

    #[error("direct convolution refused: {modes} modes exceeds budget of {budget}")]
    ModeBudgetExceeded { modes: usize, budget: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("bound `{name}` violated at t = {time}: ratio {ratio}")]
    BoundViolation { name: String, time: f64, ratio: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
