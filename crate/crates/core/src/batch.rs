use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use crate::error::Error;
use crate::key::SearchKey;
use crate::searcher::Searcher;

/// How sort batches are assigned to workers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Schedule {
    /// Worker w owns one contiguous run of batches.
    StaticContiguous,
    /// Worker w owns batches w, w + workers, w + 2*workers, ...
    StaticStrided,
    /// Workers claim the next unprocessed batch from a shared counter.
    Dynamic,
}

impl Schedule {
    pub const ALL: [Schedule; 3] = [
        Schedule::StaticContiguous,
        Schedule::StaticStrided,
        Schedule::Dynamic,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Schedule::StaticContiguous => "static-contiguous",
            Schedule::StaticStrided => "static-strided",
            Schedule::Dynamic => "dynamic",
        }
    }
}

impl std::fmt::Display for Schedule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Schedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "static-contiguous" => Ok(Schedule::StaticContiguous),
            "static-strided" => Ok(Schedule::StaticStrided),
            "dynamic" => Ok(Schedule::Dynamic),
            other => Err(Error::InvalidConfig(format!(
                "unknown schedule {other:?}; expected static-contiguous, static-strided or dynamic"
            ))),
        }
    }
}

/// Whether a batch is sorted before searching and how results return to
/// submission order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Reorder {
    /// Search in submission order.
    None,
    /// Sort the batch, search in sorted order, scatter each result straight
    /// to its original slot.
    Lookup,
    /// Sort the batch, search in sorted order into a dense staging buffer,
    /// then invert the permutation in one pass.
    Full,
}

impl Reorder {
    pub const ALL: [Reorder; 3] = [Reorder::None, Reorder::Lookup, Reorder::Full];

    pub fn as_str(self) -> &'static str {
        match self {
            Reorder::None => "none",
            Reorder::Lookup => "lookup",
            Reorder::Full => "full",
        }
    }
}

impl std::fmt::Display for Reorder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Reorder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(Reorder::None),
            "lookup" => Ok(Reorder::Lookup),
            "full" => Ok(Reorder::Full),
            other => Err(Error::InvalidConfig(format!(
                "unknown reorder mode {other:?}; expected none, lookup or full"
            ))),
        }
    }
}

/// Pipeline tuning knobs. None of them may change results, only performance;
/// the output is defined purely by searcher and submission order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecConfig {
    pub workers: usize,
    /// Lookups per sort batch; each batch is sorted (and unsorted)
    /// independently.
    pub sort_batch: usize,
    /// Lookups a worker stages together before searching them.
    pub stage_per_worker: usize,
    pub schedule: Schedule,
    pub reorder: Reorder,
}

impl Default for ExecConfig {
    fn default() -> Self {
        Self {
            workers: std::thread::available_parallelism()
                .map(std::num::NonZeroUsize::get)
                .unwrap_or(1),
            sort_batch: 1024,
            stage_per_worker: 8,
            schedule: Schedule::StaticContiguous,
            reorder: Reorder::None,
        }
    }
}

impl ExecConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if self.workers == 0 {
            return Err(Error::InvalidConfig("workers must be at least 1".into()));
        }
        if self.sort_batch == 0 {
            return Err(Error::InvalidConfig("sort_batch must be at least 1".into()));
        }
        if self.stage_per_worker == 0 {
            return Err(Error::InvalidConfig(
                "stage_per_worker must be at least 1".into(),
            ));
        }
        if !self.sort_batch.is_multiple_of(self.stage_per_worker) {
            return Err(Error::InvalidConfig(format!(
                "sort_batch ({}) must be a multiple of stage_per_worker ({})",
                self.sort_batch, self.stage_per_worker
            )));
        }
        Ok(())
    }
}

/// Non-empty sequence of lookup keys in submission order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LookupBatch<K> {
    keys: Vec<K>,
}

impl<K: SearchKey> LookupBatch<K> {
    pub fn new(keys: Vec<K>) -> Result<Self, Error> {
        if keys.is_empty() {
            return Err(Error::InvalidConfig(
                "lookup batch must be non-empty".into(),
            ));
        }
        Ok(Self { keys })
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    /// Always false; emptiness is rejected at construction.
    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn keys(&self) -> &[K] {
        &self.keys
    }

    pub fn into_keys(self) -> Vec<K> {
        self.keys
    }
}

/// One lookup's outcome packed into a u64 slot so workers can publish results
/// with plain atomic stores: the found index, or `ABSENT`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SlotResult(u64);

impl SlotResult {
    /// Key not present. All-ones never collides with a real index.
    pub const ABSENT: SlotResult = SlotResult(u64::MAX);

    pub fn hit(index: usize) -> Self {
        debug_assert!((index as u64) < u64::MAX);
        SlotResult(index as u64)
    }

    pub fn from_find(found: Option<usize>) -> Self {
        match found {
            Some(i) => SlotResult::hit(i),
            None => SlotResult::ABSENT,
        }
    }

    pub fn from_raw(raw: u64) -> Self {
        SlotResult(raw)
    }

    pub fn raw(self) -> u64 {
        self.0
    }

    pub fn is_absent(self) -> bool {
        self.0 == u64::MAX
    }

    pub fn index(self) -> Option<usize> {
        if self.is_absent() {
            None
        } else {
            Some(self.0 as usize)
        }
    }
}

/// Mapping from sorted slots back to submission slots: `forward()[p]` is the
/// submission index of the key that landed in sorted position p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    forward: Vec<usize>,
}

impl Permutation {
    /// Validated constructor; `forward` must visit every slot exactly once.
    pub fn new(forward: Vec<usize>) -> Result<Self, Error> {
        let len = forward.len();
        let mut seen = vec![false; len];
        for &slot in &forward {
            if slot >= len || seen[slot] {
                return Err(Error::NotAPermutation { len });
            }
            seen[slot] = true;
        }
        Ok(Self { forward })
    }

    pub fn identity(len: usize) -> Self {
        Self {
            forward: (0..len).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn forward(&self) -> &[usize] {
        &self.forward
    }
}

/// Sort a batch ascending, remembering where each key came from. The sort is
/// stable: equal keys keep their submission order.
pub fn block_sort<K: SearchKey>(batch: &[K]) -> (Vec<K>, Permutation) {
    let mut forward: Vec<usize> = (0..batch.len()).collect();
    forward.sort_by_key(|&i| batch[i]);
    let sorted = forward.iter().map(|&i| batch[i]).collect();
    (sorted, Permutation { forward })
}

/// Invert a block sort: route sorted-order results back to submission order.
pub fn unsort<T: Copy>(results: &[T], perm: &Permutation) -> Result<Vec<T>, Error> {
    if results.len() != perm.len() {
        return Err(Error::LengthMismatch {
            results: results.len(),
            permutation: perm.len(),
        });
    }
    let mut out = results.to_vec();
    for (p, &original) in perm.forward.iter().enumerate() {
        out[original] = results[p];
    }
    Ok(out)
}

/// Resolve every lookup in the batch against `searcher` using `workers`
/// threads. The result vector is in submission order and is identical for
/// every schedule, reorder mode, worker count and batch size.
pub fn run_pipeline<K: SearchKey, S: Searcher<K>>(
    searcher: &S,
    batch: &LookupBatch<K>,
    config: &ExecConfig,
) -> Result<Vec<SlotResult>, Error> {
    config.validate()?;
    let keys = batch.keys();
    let slots: Vec<AtomicU64> = (0..keys.len())
        .map(|_| AtomicU64::new(SlotResult::ABSENT.raw()))
        .collect();
    let num_batches = keys.len().div_ceil(config.sort_batch);
    let next_batch = AtomicUsize::new(0);

    std::thread::scope(|scope| {
        for w in 0..config.workers {
            let slots = &slots;
            let next_batch = &next_batch;
            scope.spawn(move || match config.schedule {
                Schedule::StaticContiguous => {
                    let per = num_batches / config.workers;
                    let extra = num_batches % config.workers;
                    let lo = w * per + w.min(extra);
                    let hi = lo + per + usize::from(w < extra);
                    for b in lo..hi {
                        process_batch(searcher, keys, slots, b, config);
                    }
                }
                Schedule::StaticStrided => {
                    let mut b = w;
                    while b < num_batches {
                        process_batch(searcher, keys, slots, b, config);
                        b += config.workers;
                    }
                }
                Schedule::Dynamic => loop {
                    let b = next_batch.fetch_add(1, Ordering::Relaxed);
                    if b >= num_batches {
                        break;
                    }
                    process_batch(searcher, keys, slots, b, config);
                },
            });
        }
    });

    Ok(slots
        .into_iter()
        .map(|slot| SlotResult::from_raw(slot.into_inner()))
        .collect())
}

/// Resolve the b-th sort batch. Slot ranges of distinct batches are disjoint,
/// so relaxed stores suffice; the scope join publishes them to the caller.
fn process_batch<K: SearchKey, S: Searcher<K>>(
    searcher: &S,
    keys: &[K],
    slots: &[AtomicU64],
    b: usize,
    config: &ExecConfig,
) {
    let lo = b * config.sort_batch;
    let hi = (lo + config.sort_batch).min(keys.len());
    let batch = &keys[lo..hi];
    let out = &slots[lo..hi];

    match config.reorder {
        Reorder::None => {
            for (i, &key) in batch.iter().enumerate() {
                let r = SlotResult::from_find(searcher.find(key));
                out[i].store(r.raw(), Ordering::Relaxed);
            }
        }
        Reorder::Lookup => {
            let (sorted, perm) = block_sort(batch);
            let forward = perm.forward();
            let mut stage: Vec<K> = Vec::with_capacity(config.stage_per_worker);
            let mut p = 0;
            for run in sorted.chunks(config.stage_per_worker) {
                // Load phase, then search phase, mirroring how a staged batch
                // keeps its keys resident while the searches run.
                stage.clear();
                stage.extend_from_slice(run);
                for &key in &stage {
                    let r = SlotResult::from_find(searcher.find(key));
                    out[forward[p]].store(r.raw(), Ordering::Relaxed);
                    p += 1;
                }
            }
        }
        Reorder::Full => {
            let (sorted, perm) = block_sort(batch);
            let mut staged = Vec::with_capacity(sorted.len());
            let mut stage: Vec<K> = Vec::with_capacity(config.stage_per_worker);
            for run in sorted.chunks(config.stage_per_worker) {
                stage.clear();
                stage.extend_from_slice(run);
                for &key in &stage {
                    staged.push(SlotResult::from_find(searcher.find(key)));
                }
            }
            let restored = unsort(&staged, &perm).expect("staged results match batch length");
            for (i, r) in restored.into_iter().enumerate() {
                out[i].store(r.raw(), Ordering::Relaxed);
            }
        }
    }
}
