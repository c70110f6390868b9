use thiserror::Error;

use crate::ltl::LtlError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid arena: {0}")]
    InvalidArena(String),

    #[error("invalid history: {0}")]
    InvalidHistory(String),

    #[error("invalid lasso: {0}")]
    InvalidLasso(String),

    #[error(transparent)]
    Ltl(#[from] LtlError),

    #[error("cost overflow while summing resource {resource}")]
    CostOverflow { resource: usize },

    #[error("resource {resource} drops to {value} after a prefix of {prefix_len} states")]
    Underflow {
        prefix_len: usize,
        resource: usize,
        value: i64,
    },

    #[error("bounds have {got} components but the arena has {expected} resources")]
    BoundsArity { expected: usize, got: usize },

    #[error("negative bound {0}")]
    NegativeBound(i64),

    #[error(
        "no resource bounds given: careful synthesis with unbounded resources is undecidable \
         (already for two players and two resources); supply bounds"
    )]
    Unbounded,

    #[error("unfolding exceeds the state budget of {limit} states")]
    StateBudget { limit: usize },

    #[error("product exceeds the budget of {limit} states")]
    ProductBudget { limit: usize },

    #[error("objective of player {player} is outside the supported fragments: {formula}")]
    UnsupportedObjective { player: usize, formula: String },

    #[error("priority {priority} exceeds the configured maximum {max}")]
    PriorityBound { priority: u32, max: u32 },

    #[error("invalid parity automaton: {0}")]
    InvalidDpa(String),

    #[error("invalid counter automaton: {0}")]
    InvalidCounterAutomaton(String),

    #[error("malformed strategy profile: {0}")]
    MalformedProfile(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn json(err: serde_json::Error) -> Self {
        Error::Syntax {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }
}
