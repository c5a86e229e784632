use std::fmt;
use std::str::FromStr;

use crate::error::Error;
use crate::kary::KaryIndex;
use crate::key::SearchKey;
use crate::pinned::PinnedCache;
use crate::search::SortedKeys;
use crate::trace::{AccessTrace, NoTrace, ProbeSink};

/// Uniform lookup interface over the search variants, so the pipeline, the
/// verifier and the benchmarks can treat them interchangeably. All variants
/// answer against the same base array and must agree exactly.
pub trait Searcher<K: SearchKey>: Sync {
    /// The array being searched.
    fn base(&self) -> &SortedKeys<K>;

    /// Offset-search semantics: smallest index with a key >= `key`, clamped
    /// to the last index when every key is smaller. Reports probes to `sink`.
    fn search_offset_with<S: ProbeSink>(&self, key: K, sink: &mut S) -> usize;

    fn search_offset(&self, key: K) -> usize {
        self.search_offset_with(key, &mut NoTrace)
    }

    /// First index with a key >= `key`, or `len` when none qualifies.
    fn lower_bound(&self, key: K) -> usize {
        self.lower_bound_with(key, &mut NoTrace)
    }

    fn lower_bound_with<S: ProbeSink>(&self, key: K, sink: &mut S) -> usize {
        let i = self.search_offset_with(key, sink);
        if self.base().as_slice()[i] >= key {
            i
        } else {
            self.base().len()
        }
    }

    /// First index holding exactly `key`, if present.
    fn find(&self, key: K) -> Option<usize> {
        self.find_with(key, &mut NoTrace)
    }

    fn find_with<S: ProbeSink>(&self, key: K, sink: &mut S) -> Option<usize> {
        let i = self.lower_bound_with(key, sink);
        let keys = self.base().as_slice();
        if i < keys.len() && keys[i] == key {
            Some(i)
        } else {
            None
        }
    }

    /// Entries held in auxiliary structures beyond the base array. Drives
    /// footprint and overhead reporting.
    fn aux_entries(&self) -> usize;
}

/// Run `find` while recording every probe. The result is exactly what the
/// untraced call returns; sinks cannot influence control flow by contract.
pub fn traced_search<K: SearchKey, S: Searcher<K> + ?Sized>(
    searcher: &S,
    key: K,
) -> (Option<usize>, AccessTrace) {
    let mut trace = AccessTrace::new();
    let result = searcher.find_with(key, &mut trace);
    (result, trace)
}

/// Plain offset search over the base array, no auxiliary structure.
#[derive(Debug, Clone)]
pub struct NaiveSearcher<'a, K> {
    keys: &'a SortedKeys<K>,
}

impl<'a, K: SearchKey> NaiveSearcher<'a, K> {
    pub fn new(keys: &'a SortedKeys<K>) -> Self {
        Self { keys }
    }
}

impl<K: SearchKey> Searcher<K> for NaiveSearcher<'_, K> {
    fn base(&self) -> &SortedKeys<K> {
        self.keys
    }

    fn search_offset_with<S: ProbeSink>(&self, key: K, sink: &mut S) -> usize {
        self.keys.offset_search_with(key, sink)
    }

    fn aux_entries(&self) -> usize {
        0
    }
}

/// Offset search with the leading descent levels answered from a pinned copy.
#[derive(Debug, Clone)]
pub struct StepsPinnedSearcher<'a, K> {
    keys: &'a SortedKeys<K>,
    cache: PinnedCache<K>,
}

impl<'a, K: SearchKey> StepsPinnedSearcher<'a, K> {
    pub fn new(keys: &'a SortedKeys<K>, budget_slots: usize) -> Result<Self, Error> {
        Ok(Self {
            keys,
            cache: PinnedCache::build(keys, budget_slots)?,
        })
    }

    pub fn cache(&self) -> &PinnedCache<K> {
        &self.cache
    }
}

impl<K: SearchKey> Searcher<K> for StepsPinnedSearcher<'_, K> {
    fn base(&self) -> &SortedKeys<K> {
        self.keys
    }

    fn search_offset_with<S: ProbeSink>(&self, key: K, sink: &mut S) -> usize {
        self.cache.search_steps_pinned_with(self.keys, key, sink)
    }

    fn aux_entries(&self) -> usize {
        self.cache.slots_used()
    }
}

/// Pinned search that also consults the partial next-level entries.
#[derive(Debug, Clone)]
pub struct FullPinnedSearcher<'a, K> {
    keys: &'a SortedKeys<K>,
    cache: PinnedCache<K>,
}

impl<'a, K: SearchKey> FullPinnedSearcher<'a, K> {
    pub fn new(keys: &'a SortedKeys<K>, budget_slots: usize) -> Result<Self, Error> {
        Ok(Self {
            keys,
            cache: PinnedCache::build(keys, budget_slots)?,
        })
    }

    pub fn cache(&self) -> &PinnedCache<K> {
        &self.cache
    }
}

impl<K: SearchKey> Searcher<K> for FullPinnedSearcher<'_, K> {
    fn base(&self) -> &SortedKeys<K> {
        self.keys
    }

    fn search_offset_with<S: ProbeSink>(&self, key: K, sink: &mut S) -> usize {
        self.cache.search_full_pinned_with(self.keys, key, sink)
    }

    fn aux_entries(&self) -> usize {
        self.cache.slots_used()
    }
}

/// K-ary descent to a leaf chunk, offset search inside it.
#[derive(Debug, Clone)]
pub struct KarySearcher<'a, K> {
    index: KaryIndex<'a, K>,
}

impl<'a, K: SearchKey> KarySearcher<'a, K> {
    pub fn new(keys: &'a SortedKeys<K>, fan_out: usize, leaf_chunk: usize) -> Result<Self, Error> {
        Ok(Self {
            index: KaryIndex::build(keys, fan_out, leaf_chunk)?,
        })
    }

    /// Wrap an existing index, e.g. one mutated by a fault-injection hook.
    pub fn from_index(index: KaryIndex<'a, K>) -> Self {
        Self { index }
    }

    pub fn index(&self) -> &KaryIndex<'a, K> {
        &self.index
    }
}

impl<K: SearchKey> Searcher<K> for KarySearcher<'_, K> {
    fn base(&self) -> &SortedKeys<K> {
        self.index.base()
    }

    fn search_offset_with<S: ProbeSink>(&self, key: K, sink: &mut S) -> usize {
        self.index.search_with(key, sink)
    }

    fn aux_entries(&self) -> usize {
        self.index.separator_count()
    }
}

/// The selectable search variants, in CLI spelling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Naive,
    StepsPinned,
    FullPinned,
    Kary,
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant::Naive,
        Variant::StepsPinned,
        Variant::FullPinned,
        Variant::Kary,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Naive => "naive",
            Variant::StepsPinned => "steps-pinned",
            Variant::FullPinned => "full-pinned",
            Variant::Kary => "kary",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "naive" => Ok(Variant::Naive),
            "steps-pinned" => Ok(Variant::StepsPinned),
            "full-pinned" => Ok(Variant::FullPinned),
            "kary" => Ok(Variant::Kary),
            other => Err(Error::InvalidConfig(format!(
                "unknown variant {other:?}; expected naive, steps-pinned, full-pinned or kary"
            ))),
        }
    }
}

/// Structure-build parameters shared by the variants that need them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildParams {
    /// Cache slots available to the pinned variants.
    pub pin_budget_slots: usize,
    /// Fan-out K of the separator index.
    pub fan_out: usize,
    /// Keys per leaf chunk of the separator index.
    pub leaf_chunk: usize,
}

/// Default pin budget in bytes; divide by the key width for slots.
pub const DEFAULT_PIN_BUDGET_BYTES: usize = 100 * 1024;
pub const DEFAULT_FAN_OUT: usize = 17;
pub const DEFAULT_LEAF_CHUNK: usize = 32;

impl Default for BuildParams {
    fn default() -> Self {
        Self {
            pin_budget_slots: DEFAULT_PIN_BUDGET_BYTES / 4,
            fan_out: DEFAULT_FAN_OUT,
            leaf_chunk: DEFAULT_LEAF_CHUNK,
        }
    }
}

/// Enum dispatch over the variants, for call sites that pick one at runtime.
#[derive(Debug, Clone)]
pub enum AnySearcher<'a, K: SearchKey> {
    Naive(NaiveSearcher<'a, K>),
    StepsPinned(StepsPinnedSearcher<'a, K>),
    FullPinned(FullPinnedSearcher<'a, K>),
    Kary(KarySearcher<'a, K>),
}

impl<'a, K: SearchKey> AnySearcher<'a, K> {
    pub fn build(
        variant: Variant,
        keys: &'a SortedKeys<K>,
        params: &BuildParams,
    ) -> Result<Self, Error> {
        Ok(match variant {
            Variant::Naive => AnySearcher::Naive(NaiveSearcher::new(keys)),
            Variant::StepsPinned => {
                AnySearcher::StepsPinned(StepsPinnedSearcher::new(keys, params.pin_budget_slots)?)
            }
            Variant::FullPinned => {
                AnySearcher::FullPinned(FullPinnedSearcher::new(keys, params.pin_budget_slots)?)
            }
            Variant::Kary => {
                AnySearcher::Kary(KarySearcher::new(keys, params.fan_out, params.leaf_chunk)?)
            }
        })
    }

    pub fn variant(&self) -> Variant {
        match self {
            AnySearcher::Naive(_) => Variant::Naive,
            AnySearcher::StepsPinned(_) => Variant::StepsPinned,
            AnySearcher::FullPinned(_) => Variant::FullPinned,
            AnySearcher::Kary(_) => Variant::Kary,
        }
    }
}

impl<K: SearchKey> Searcher<K> for AnySearcher<'_, K> {
    fn base(&self) -> &SortedKeys<K> {
        match self {
            AnySearcher::Naive(s) => s.base(),
            AnySearcher::StepsPinned(s) => s.base(),
            AnySearcher::FullPinned(s) => s.base(),
            AnySearcher::Kary(s) => s.base(),
        }
    }

    fn search_offset_with<S: ProbeSink>(&self, key: K, sink: &mut S) -> usize {
        match self {
            AnySearcher::Naive(s) => s.search_offset_with(key, sink),
            AnySearcher::StepsPinned(s) => s.search_offset_with(key, sink),
            AnySearcher::FullPinned(s) => s.search_offset_with(key, sink),
            AnySearcher::Kary(s) => s.search_offset_with(key, sink),
        }
    }

    fn aux_entries(&self) -> usize {
        match self {
            AnySearcher::Naive(s) => s.aux_entries(),
            AnySearcher::StepsPinned(s) => s.aux_entries(),
            AnySearcher::FullPinned(s) => s.aux_entries(),
            AnySearcher::Kary(s) => s.aux_entries(),
        }
    }
}
