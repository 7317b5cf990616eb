use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid rational literal `{0}`")]
    Parse(String),
    #[error("not convex: slopes must be nondecreasing ({0})")]
    NotConvex(String),
    #[error("malformed piecewise-linear function: {0}")]
    Malformed(String),
    #[error("empty interval where a nonempty one is required")]
    EmptyInterval,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("grid mismatch: {0}")]
    Grid(String),
    #[error("invalid scenario tree: {0}")]
    Tree(String),
    #[error("measure has a negative atom at slot {slot}")]
    NegativeMeasure { slot: usize },
    #[error("process is not adapted (scenario {scenario}, slot {slot})")]
    NotAdapted { scenario: usize, slot: usize },
    #[error("process is not predictable (scenario {scenario}, slot {slot})")]
    NotPredictable { scenario: usize, slot: usize },
    #[error("precondition failed at slot {slot}: {reason}")]
    Precondition { slot: usize, reason: String },
    #[error("assumption failed: {0}")]
    Assumption(String),
    #[error("brute-force budget exceeded: {required} lattice evaluations needed, cap is {cap}")]
    Budget { required: u128, cap: u128 },
    #[error("primal value is infinite")]
    InfinitePrimal,
    #[error("schema error: {0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, Error>;
