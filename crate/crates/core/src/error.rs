use thiserror::Error;

/// Errors produced by the rating model, the dynamics and the simulation layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("rating vector does not sum to zero (sum = {sum:e})")]
    NotZeroSum { sum: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("player index {index} out of range for {n} players")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("score model infeasible for pair ({i}, {j}): {reason}")]
    InfeasibleScoreModel { i: usize, j: usize, reason: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("iteration cap of {cap} exceeded in {stage}")]
    IterationCap { stage: &'static str, cap: u64 },

    #[error(
        "coupling contraction violated at step {step}: \
         change {lhs:e} exceeds bound {rhs:e}"
    )]
    CouplingViolation { step: usize, lhs: f64, rhs: f64 },

    #[error("empty input")]
    EmptyInput,

    #[error("could not allocate storage for {0}")]
    Allocation(String),

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("path plan parse error at line {line}: {message}")]
    PlanParse { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
