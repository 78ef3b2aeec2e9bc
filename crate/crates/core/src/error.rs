use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid chain: {0}")]
    InvalidChain(String),

    #[error("coupling {index} is zero; the chain is reducible")]
    ReducibleChain { index: usize },

    #[error("chain is not mirror symmetric (max relative deviation {deviation:e})")]
    NotMirrorSymmetric { deviation: f64 },

    #[error("invalid region partition: {0}")]
    InvalidPartition(String),

    #[error("invalid extension problem: {0}")]
    InvalidProblem(String),

    #[error(
        "target {value} is an eigenvalue of both the folded block and its truncation; the constraint is ill-posed"
    )]
    IllPosedTarget { value: f64 },

    #[error("constraint system is degenerate (condition estimate {condition:e}): {detail}")]
    Degenerate { condition: f64, detail: String },

    #[error("interpolation point {node} is unattainable: {detail}")]
    Unattainable { node: f64, detail: String },

    #[error("no valid chain realises these targets: {0}")]
    Infeasible(String),

    #[error("assembled chain misses target {target} by {deviation:e} (tolerance {tolerance:e})")]
    VerificationFailed {
        target: f64,
        deviation: f64,
        tolerance: f64,
    },

    #[error("empty null space: smallest singular value {smallest_singular:e} exceeds tolerance")]
    EmptyNullSpace { smallest_singular: f64 },

    #[error("eigensolver failed to converge for index {0}")]
    NoConvergence(usize),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
