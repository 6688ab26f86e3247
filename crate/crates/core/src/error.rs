use thiserror::Error;

/// Failures raised by the lattice engine and its estimators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error in {func}: {value} is outside the domain")]
    Domain { func: &'static str, value: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("drift overflow at step {step}, slot {slot}: u = {value}")]
    DriftOverflow { step: u64, slot: usize, value: f64 },

    #[error("unstable step {step}, slot {slot}: |drift| = {drift} exceeds 1/dt = {limit}")]
    Unstable {
        step: u64,
        slot: usize,
        drift: f64,
        limit: f64,
    },

    #[error("non-finite state at step {step}, slot {slot}")]
    NonFinite { step: u64, slot: usize },

    #[error("test function support clipped by lattice edge: right edge {edge} >= J = {lattice}")]
    SupportClipped { edge: f64, lattice: usize },

    #[error("block [{start}, {end}] exits lattice of size {lattice}")]
    BlockOutOfRange {
        start: usize,
        end: usize,
        lattice: usize,
    },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("replica {replica} aborted: {source}")]
    ReplicaAborted {
        replica: u64,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
