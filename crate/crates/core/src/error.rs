use thiserror::Error;

use crate::circuit::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("duplicate register `{0}`")]
    DuplicateRegister(String),

    #[error("unknown register `{0}`")]
    UnknownRegister(String),

    #[error("qubit {register}[{index}] out of range (register size {size})")]
    QubitOutOfRange {
        register: String,
        index: usize,
        size: usize,
    },

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("segment window must be at least 1")]
    InvalidWindow,

    #[error("group {group} references gate {seq}, which is not a grouping-eligible gate of the circuit")]
    UnknownGroupGate { group: usize, seq: usize },

    #[error("vertex {0} has no block assignment")]
    Unassigned(usize),

    #[error("vertex {vertex} assigned to block {block}, but only {blocks} blocks exist")]
    BlockOutOfRange {
        vertex: usize,
        block: usize,
        blocks: usize,
    },

    #[error("malformed hMETIS input at line {line}: {msg}")]
    Hmetis { line: usize, msg: String },

    #[error("infeasible capacities: {0}")]
    Infeasible(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("instance too large for exhaustive search: {0}")]
    TooLarge(String),

    #[error("cannot simulate: {0}")]
    Simulation(String),

    #[error("statevector dimensions differ ({0} vs {1})")]
    DimensionMismatch(usize, usize),

    #[error("partition has {got} blocks but the environment has {expected} QPUs")]
    BlockCountMismatch { expected: usize, got: usize },

    #[error("invalid suite: {0}")]
    Suite(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
