use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("{what} lies outside the domain")]
    OutOfDomain { what: String },

    #[error("t-section over |x| = {radius} is empty (psi(1) = {limit})")]
    EmptySection { radius: f64, limit: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("grid needs {requested} lattice nodes, budget is {budget}")]
    NodeBudget { budget: usize, requested: u128 },

    #[error("sampled value at node {node} ({coords}) is not finite")]
    Sampling { node: usize, coords: String },

    #[error("node {node} ({coords}) has no masked neighbour along axis {axis}")]
    Stencil { node: usize, axis: usize, coords: String },

    #[error("operation needs dimension {expected}, got n = {n}")]
    UnsupportedDimension { n: usize, expected: usize },

    #[error("cloud of {size} points exceeds the budget of {budget}")]
    CloudBudget { size: usize, budget: usize },

    #[error("internal invariant violated: {0}")]
    Internal(String),
}
