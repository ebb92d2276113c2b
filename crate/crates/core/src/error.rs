use thiserror::Error;

use crate::formula::ParseError;

/// Input and capacity errors shared across the crate.
///
/// Semantic outcomes (validation violations, counterexamples, rejected
/// derivations, failed witnesses) are returned as data, never through this
/// type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown state `{0}`")]
    UnknownState(String),

    #[error("unknown agent `{0}`")]
    UnknownAgent(String),

    #[error("action `{action}` is not available to agent `{agent}` in state `{state}`")]
    UnknownAction {
        state: String,
        agent: String,
        action: String,
    },

    #[error("malformed action profile at state `{state}`: {reason}")]
    MalformedProfile { state: String, reason: String },

    #[error("duplicate {kind} `{name}`")]
    Duplicate { kind: &'static str, name: String },

    #[error("empty {0} name")]
    EmptyName(&'static str),

    #[error("proposition name `{0}` is reserved")]
    ReservedProposition(String),

    #[error("{what} exceeds capacity: {actual} > {limit}")]
    Capacity {
        what: &'static str,
        limit: u64,
        actual: u64,
    },

    #[error("missing binding for metavariable `{0}`")]
    MissingBinding(String),

    #[error("rule side condition violated: {0}")]
    SideCondition(String),

    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),

    #[error("formula is outside the next-step fragment: {0}")]
    NotInFragment(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
