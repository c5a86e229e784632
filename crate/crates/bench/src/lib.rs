//! Shared fixtures for the criterion benchmarks.

use searchlab_core::{LookupOrder, Workload, WorkloadSpec};

/// Deterministic benchmark workload: 2^`n_log2` distinct keys and
/// 2^`lookups_log2` randomly ordered lookups, all present.
pub fn fixture(n_log2: u32, lookups_log2: u32, seed: u64) -> Workload<u32> {
    Workload::generate(&WorkloadSpec {
        n: 1 << n_log2,
        lookups: 1 << lookups_log2,
        hit_ratio: 1.0,
        order: LookupOrder::Random,
        seed,
    })
    .expect("benchmark spec is in range")
}
