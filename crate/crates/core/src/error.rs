use thiserror::Error;

#[derive(Debug, Error)]
pub enum RigError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// Modularity is only defined for graphs with at least one edge.
    #[error("graph has no edges; modularity is undefined")]
    EmptyGraph,

    #[error("instance too large: n = {n} exceeds the limit {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error(
        "incidence keeps only attributes with at least two members; exclusive-attribute statistics are unavailable"
    )]
    EdgesOnlyIncidence,

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("memory budget exceeded: {needed:.3e} stored memberships requested, cap is {cap:.3e}")]
    BudgetExceeded { needed: f64, cap: f64 },

    #[error("regime preconditions not met: {0}")]
    RegimeInvalid(String),

    #[error("no input rows")]
    EmptyInput,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, RigError>;
