use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("agent {agent} out of range for a graph with {n} agents")]
    AgentOutOfRange { agent: usize, n: usize },
    #[error("self-loop on agent {0}")]
    SelfLoop(usize),
    #[error("graph is disconnected: agent {0} is unreachable from agent 0")]
    Disconnected(usize),
    #[error("graph must contain at least one agent")]
    EmptyGraph,
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid policy: {0}")]
    InvalidPolicy(String),
    #[error("policy is not sigma-regular: agent {agent}, row {row} has a zero probability")]
    NotRegular { agent: usize, row: usize },
    #[error("enumeration cap exceeded in {what}: {size} > {cap}")]
    CapExceeded { what: &'static str, size: u128, cap: u128 },
    #[error("multiplicative weights did not converge at state {state} within {budget} iterations (last TV change {last_change:.3e}); tau is likely too small for the contraction regime")]
    MwBudget { state: usize, budget: usize, last_change: f64 },
    #[error("induced chain is {kind}: {detail}")]
    Chain { kind: &'static str, detail: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
