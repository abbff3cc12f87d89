//! Crate-wide error type.

use thiserror::Error;

/// Every fallible operation in this crate returns this error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("self-loop edge on node {0:?}")]
    SelfLoop(String),

    #[error("edge endpoint {0:?} is not a declared node")]
    UnknownEndpoint(String),

    #[error("duplicate node {0:?}")]
    DuplicateNode(String),

    #[error("graph has {actual} nodes, exceeding the limit of {limit}")]
    NodeLimitExceeded { limit: usize, actual: usize },

    #[error("unknown node {0:?}")]
    UnknownNode(String),

    #[error("graph contains a directed cycle")]
    CyclicGraph,

    #[error("path endpoints must be distinct")]
    SameEndpoints,

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("endpoint {0:?} is in the conditioning set")]
    EndpointConditioned(String),

    #[error("no unobserved term bound for node {0:?}")]
    MissingUnobservedTerm(String),

    #[error("no node function assigned for node {0:?}")]
    MissingNodeFunction(String),

    #[error("node function arity mismatch at node {0:?}")]
    ArityMismatch(String),

    #[error("value outside the node function's domain at node {0:?}")]
    DomainMismatch(String),

    #[error("value domain must contain at least two elements")]
    DomainTooSmall,

    #[error("invalid clean connection: {0}")]
    InvalidCleanConnection(String),

    #[error("assignment domain does not match the conditioning set: {0}")]
    ConditioningMismatch(String),

    #[error("alpha and beta must be distinct values")]
    AlphaBetaEqual,

    #[error("search budget exhausted; result is indeterminate")]
    BudgetExhausted,

    #[error("malformed witness: {0}")]
    MalformedWitness(String),

    #[error("not a refuting witness: {0}")]
    NotAWitness(String),

    #[error("oracle precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("illegal intervention: {0}")]
    IllegalIntervention(String),

    #[error("inconclusive run: {0}")]
    InconclusiveRun(String),

    #[error("malformed JSON: {0}")]
    MalformedJson(String),

    #[error("schema violation: {0}")]
    SchemaViolation(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable machine-readable name for CLI output.
    pub fn name(&self) -> &'static str {
        match self {
            Error::SelfLoop(_) => "SelfLoop",
            Error::UnknownEndpoint(_) => "UnknownEndpoint",
            Error::DuplicateNode(_) => "DuplicateNode",
            Error::NodeLimitExceeded { .. } => "NodeLimitExceeded",
            Error::UnknownNode(_) => "UnknownNode",
            Error::CyclicGraph => "CyclicGraph",
            Error::SameEndpoints => "SameEndpoints",
            Error::InvalidPath(_) => "InvalidPath",
            Error::EndpointConditioned(_) => "EndpointConditioned",
            Error::MissingUnobservedTerm(_) => "MissingUnobservedTerm",
            Error::MissingNodeFunction(_) => "MissingNodeFunction",
            Error::ArityMismatch(_) => "ArityMismatch",
            Error::DomainMismatch(_) => "DomainMismatch",
            Error::DomainTooSmall => "DomainTooSmall",
            Error::InvalidCleanConnection(_) => "InvalidCleanConnection",
            Error::ConditioningMismatch(_) => "ConditioningMismatch",
            Error::AlphaBetaEqual => "AlphaBetaEqual",
            Error::BudgetExhausted => "BudgetExhausted",
            Error::MalformedWitness(_) => "MalformedWitness",
            Error::NotAWitness(_) => "NotAWitness",
            Error::PreconditionViolated(_) => "PreconditionViolated",
            Error::IllegalIntervention(_) => "IllegalIntervention",
            Error::InconclusiveRun(_) => "InconclusiveRun",
            Error::MalformedJson(_) => "MalformedJson",
            Error::SchemaViolation(_) => "SchemaViolation",
            Error::Io(_) => "Io",
            Error::Internal(_) => "Internal",
        }
    }
}
