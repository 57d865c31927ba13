use crate::model::VoterId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{what} enumeration exceeded its budget of {cap}")]
    BudgetExceeded { what: &'static str, cap: usize },

    #[error("the lexicographic order does not induce a confluent rule")]
    NotConfluentOrder,

    #[error("no C-branching exists: voter {0} has no usable outgoing edge")]
    Infeasible(VoterId),

    #[error("branchings do not belong to the same instance: {0}")]
    MismatchedInstance(String),

    #[error("precondition not met: {0}")]
    PreconditionUnmet(String),

    #[error("order produced no unique maximum for voter {0}")]
    NonUniqueMax(VoterId),

    #[error("average rank and unpopularity are only defined for confluent resolutions")]
    NonConfluentMetrics,

    #[error("cannot aggregate an empty list of records")]
    EmptyInput,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("need at least {delta} neighbours per voter but only {available} other voters exist")]
    InsufficientNeighbors { delta: usize, available: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
