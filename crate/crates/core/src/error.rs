use thiserror::Error;

/// Every failure the library reports. Negative verdicts (unschedulable, collision, unsat)
/// are ordinary return values, not errors.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("malformed representation: {0}")]
    MalformedRepr(String),
    #[error("state budget exceeded: graph has {states} states, budget is {budget}")]
    StateBudgetExceeded { states: String, budget: u64 },
    #[error("search budget exceeded after {0} nodes")]
    BudgetExceeded(u64),
    #[error("instance has no valid schedule")]
    NoCycle,
    #[error("density {density} exceeds the bound {bound}")]
    DensityTooHigh { density: String, bound: String },
    #[error("construction failed at {stage}: {msg}")]
    ConstructionFailed { stage: &'static str, msg: String },
    #[error("epsilon {0} outside (0, 2/7)")]
    EpsOutOfRange(String),
    #[error("formula is not 3,4-SAT: {0}")]
    Not34Sat(String),
    #[error("malformed formula: {0}")]
    MalformedFormula(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("job split failed: {0}")]
    SplitFailed(String),
    #[error("witness construction failed at {stage}: {msg}")]
    WitnessFailed { stage: &'static str, msg: String },
    #[error("job {0} not present")]
    JobAbsent(usize),
    #[error("period {0} not in the allowed list")]
    PeriodNotAllowed(String),
    #[error("jobs do not form a divisible chain")]
    NotDivisibleChain,
    #[error("combined density {0} exceeds 1")]
    DensityExceeded(String),
    #[error("flow inputs infeasible: {0}")]
    InfeasibleFlow(String),
    #[error("too many variables for exhaustive search: {vars} > {limit}")]
    VarLimitExceeded { vars: usize, limit: usize },
    #[error("generator request infeasible: {0}")]
    Infeasible(String),
    #[error("reduction input must be dense, density is {0}")]
    NonDense(String),
}

pub type Result<T> = std::result::Result<T, Error>;
