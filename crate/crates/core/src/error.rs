use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OspError {
    #[error("malformed schedule: {0}")]
    MalformedSchedule(String),
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("capacity must be at least 1")]
    CapacityZero,
    #[error("instance too large for exhaustive search: {jobs} jobs (limit {limit})")]
    TooLarge { jobs: usize, limit: usize },
    #[error("batch {batch} on machine {machine} fits no availability interval")]
    DoesNotFit { machine: usize, batch: usize },
    #[error("bad generator parameters: {0}")]
    BadParams(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
}
