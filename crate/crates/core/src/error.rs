use thiserror::Error;

use crate::graph::Node;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("node {node} out of range for a graph on {n} nodes")]
    NodeOutOfRange { node: Node, n: usize },

    #[error("self-loop at node {0}")]
    SelfLoop(Node),

    #[error("edge {{{u},{v}}} already present (multi-edges are not allowed)")]
    DuplicateEdge { u: Node, v: Node },

    #[error("node {owner} does not own an edge to {target}")]
    NotOwned { owner: Node, target: Node },

    #[error("graph is disconnected")]
    Disconnected,

    #[error("candidate universe of agent {agent} has {size} nodes, above the cap of {cap}")]
    CapExceeded {
        agent: Node,
        size: usize,
        cap: usize,
    },

    #[error("search budget of {budget} states exceeded")]
    BudgetExceeded { budget: usize },

    #[error("size {n} is outside the supported range: {reason}")]
    UnsupportedSize { n: usize, reason: &'static str },

    #[error("illegal move for agent {agent}: {reason}")]
    IllegalMove { agent: Node, reason: String },

    #[error("scripted step {step} (agent {agent}) is not strictly improving: {before} -> {after}")]
    NotImproving {
        step: usize,
        agent: Node,
        before: String,
        after: String,
    },

    #[error("graph is not regular")]
    NotRegular,

    #[error("malformed set cover instance: {0}")]
    MalformedInstance(String),

    #[error("invalid game configuration: {0}")]
    InvalidConfig(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    /// True for errors caused by exceeding a configured search or size cap.
    pub fn is_resource_limit(&self) -> bool {
        matches!(
            self,
            Error::CapExceeded { .. }
                | Error::BudgetExceeded { .. }
                | Error::UnsupportedSize { .. }
        )
    }
}
