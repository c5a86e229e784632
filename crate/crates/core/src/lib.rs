//! Batched sorted-array search with branch-free descent, hot-path caching
//! and a flat K-ary index, plus the machinery to prove the variants
//! equivalent: probe tracing, locality accounting, a deterministic workload
//! generator and a parallel lookup pipeline whose tuning knobs can never
//! change results.
//!
//! Every variant implements the same offset-descent contract: the smallest
//! index holding a key greater than or equal to the needle, clamped to the
//! last index when the needle exceeds every key. [`Searcher`] exposes that
//! plus the derived `lower_bound` / `find` forms; [`run_pipeline`] resolves
//! whole lookup batches across worker threads.

mod batch;
mod error;
mod kary;
mod key;
mod pinned;
mod search;
mod searcher;
mod trace;
mod workload;

pub use batch::{
    block_sort, run_pipeline, unsort, ExecConfig, LookupBatch, Permutation, Reorder, Schedule,
    SlotResult,
};
pub use error::Error;
pub use kary::KaryIndex;
pub use key::SearchKey;
pub use pinned::PinnedCache;
pub use search::{lpow2, SearchCursor, SortedKeys};
pub use searcher::{
    traced_search, AnySearcher, BuildParams, FullPinnedSearcher, KarySearcher, NaiveSearcher,
    Searcher, StepsPinnedSearcher, Variant, DEFAULT_FAN_OUT, DEFAULT_LEAF_CHUNK,
    DEFAULT_PIN_BUDGET_BYTES,
};
pub use trace::{
    batch_locality, shared_prefix, AccessTrace, LocalityReport, NoTrace, Probe, ProbeSink, Region,
    DEFAULT_LINE_BYTES,
};
pub use workload::{LookupOrder, Workload, WorkloadSpec};
