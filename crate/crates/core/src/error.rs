use thiserror::Error;

/// Errors raised across the design, solve, and simulation pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    Dimension {
        what: String,
        expected: String,
        got: String,
    },

    #[error("plant failed validation: {0}")]
    InvalidPlant(String),

    #[error("invalid argument {name}: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("timer value {tau} outside [0, {t2}]")]
    TauOutOfRange { tau: f64, t2: f64 },

    #[error("unknown design method {0:?}")]
    UnknownMethod(String),

    #[error("delta {delta} must exceed 2*lambda_t = {bound} for this method")]
    DeltaRange { delta: f64, bound: f64 },

    #[error("every grid point was infeasible (best phase-1 slack {best_slack:e})")]
    AllInfeasible { best_slack: f64 },

    #[error("infeasible at the lower end of the T2 range ({lower})")]
    InfeasibleAtLowerBound { lower: f64 },

    #[error("gain recovery through {matrix} is ill-conditioned (condition estimate {condition:e})")]
    IllConditionedRecovery { matrix: &'static str, condition: f64 },

    #[error("non-finite state at hybrid time (t = {t}, j = {j})")]
    NonFiniteState { t: f64, j: usize },

    #[error("input signal has zero energy over the horizon")]
    ZeroEnergyInput,

    #[error("decay margin beta = {beta:e} is not positive")]
    NonPositiveBeta { beta: f64 },

    #[error("slack reconstruction failed: {0}")]
    Reconstruction(String),

    #[error("problem has no constraint blocks")]
    EmptyProblem,

    #[error("SDPA parse error at line {line}: {reason}")]
    SdpaParse { line: usize, reason: String },

    #[error("solution file error at line {line}: {reason}")]
    SolutionParse { line: usize, reason: String },

    #[error("solver failed: {0}")]
    Solver(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dim_err(what: impl Into<String>, expected: impl ToString, got: impl ToString) -> Error {
    Error::Dimension {
        what: what.into(),
        expected: expected.to_string(),
        got: got.to_string(),
    }
}
