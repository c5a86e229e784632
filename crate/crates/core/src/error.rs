use thiserror::Error;

/// Errors reported by structure builders, the workload generator, and the
/// batch pipeline. Search itself is total over valid structures and never
/// fails.
#[derive(Debug, Error)]
pub enum Error {
    #[error("key array must be non-empty")]
    EmptyKeys,

    #[error("key array is not sorted ascending at index {0}")]
    UnsortedKeys(usize),

    #[error("pin budget of {budget} slot(s) is too small; at least 2 are required")]
    PinBudgetTooSmall { budget: usize },

    #[error("fan-out must be at least 2, got {0}")]
    FanOutTooSmall(usize),

    #[error("leaf chunk length must be at least 1, got {0}")]
    LeafChunkTooSmall(usize),

    #[error("invalid pipeline configuration: {0}")]
    InvalidConfig(String),

    #[error("result/permutation length mismatch: {results} result(s) vs {permutation} slot(s)")]
    LengthMismatch { results: usize, permutation: usize },

    #[error("forward map is not a permutation of 0..{len}")]
    NotAPermutation { len: usize },

    #[error("workload error: {0}")]
    Workload(String),
}
