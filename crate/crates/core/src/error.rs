use thiserror::Error;

/// Errors reported by the geometry, functional and invariant modules.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("metric is not positive definite at node {node:?}")]
    NotPositiveDefinite { node: Vec<usize> },
    #[error("metric is not symmetric at node {node:?}")]
    NotSymmetric { node: Vec<usize> },
    #[error("grid too small: {0}")]
    GridTooSmall(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("perturbation guard violated: coefficient {index} = {value} is more than 50% away from round")]
    GuardViolated { index: usize, value: f64 },
    #[error("chart touches a coordinate singularity: {0}")]
    CoordinateSingularity(String),
    #[error("dial degenerate: the plateau metric is round, so the Weyl mass does not grow with the plateau length")]
    DialDegenerate,
    #[error("infeasible at this resolution: {0}")]
    Infeasible(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("trial function vanishes identically")]
    ZeroTrialFunction,
    #[error("unknown catalog entry: {0}")]
    UnknownManifold(String),
    #[error("spec error at {location}: {message}")]
    Schema { location: String, message: String },
    #[error("internal invariant breached: {0}")]
    InvariantBreach(String),
    #[error("arithmetic overflow in exact computation")]
    Overflow,
}

pub type Result<T> = std::result::Result<T, Error>;
