use crate::error::Error;
use crate::key::SearchKey;
use crate::search::{descend, lpow2, SearchCursor, SortedKeys};
use crate::trace::{NoTrace, ProbeSink, Region};

/// Compact copy of the keys touched by the first `steps` levels of the offset
/// descent, plus optional partial entries for one extra half-level.
///
/// Level i of the descent only ever probes positions of the form
/// n-1 - j * (S >> i), so the union of the first M levels is the arithmetic
/// sequence n-1 - j * stride with stride = S >> (M-1). The cache stores those
/// keys ascending; a search resolves its leading steps inside the cache and
/// re-enters the main array with the remaining step width.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PinnedCache<K> {
    cached_keys: Vec<K>,
    partial_keys: Vec<K>,
    stride: usize,
    steps: usize,
    budget_slots: usize,
    n: usize,
}

impl<K: SearchKey> PinnedCache<K> {
    /// Extract the deepest level prefix that fits `budget_slots` cache slots,
    /// then fill leftover slots with partial next-level entries. At least two
    /// slots are required; one slot cannot hold even the first level.
    pub fn build(keys: &SortedKeys<K>, budget_slots: usize) -> Result<Self, Error> {
        if budget_slots < 2 {
            return Err(Error::PinBudgetTooSmall {
                budget: budget_slots,
            });
        }
        let n = keys.len();
        let top_step = lpow2(n);

        // Level count M is maximal: L(M) <= budget < L(M+1), unless the
        // stride bottoms out at 1 first (the cache then holds the full array).
        let mut steps = 1;
        let mut stride = top_step;
        loop {
            let next_stride = stride >> 1;
            if next_stride == 0 {
                break;
            }
            let next_len = (n - 1) / next_stride + 1;
            if next_len > budget_slots {
                break;
            }
            steps += 1;
            stride = next_stride;
        }
        let len = (n - 1) / stride + 1;
        debug_assert!(len <= budget_slots);

        // Slot s holds position n-1 - (len-1-s) * stride; ascending by slot.
        let slice = keys.as_slice();
        let cached_keys: Vec<K> = (0..len)
            .map(|s| slice[n - 1 - (len - 1 - s) * stride])
            .collect();

        // Partial entries preview level M+1 at positions offset by stride/2,
        // filled from the top of the array down. Pointless once stride is 1:
        // the cache already holds every key.
        let partial_keys = if stride > 1 {
            let half = stride / 2;
            let in_bounds = if n > half {
                (n - 1 - half) / stride + 1
            } else {
                0
            };
            let count = (budget_slots - len).min(in_bounds);
            (0..count)
                .map(|s| slice[n - 1 - (count - 1 - s) * stride - half])
                .collect()
        } else {
            Vec::new()
        };

        Ok(Self {
            cached_keys,
            partial_keys,
            stride,
            steps,
            budget_slots,
            n,
        })
    }

    /// Distance between adjacent cached positions in the main array.
    pub fn stride(&self) -> usize {
        self.stride
    }

    /// How many leading descent levels the cache resolves.
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn cached_keys(&self) -> &[K] {
        &self.cached_keys
    }

    pub fn partial_keys(&self) -> &[K] {
        &self.partial_keys
    }

    pub fn budget_slots(&self) -> usize {
        self.budget_slots
    }

    /// Total slots occupied; never exceeds the budget.
    pub fn slots_used(&self) -> usize {
        self.cached_keys.len() + self.partial_keys.len()
    }

    /// Length of the array this cache was extracted from.
    pub fn base_len(&self) -> usize {
        self.n
    }

    /// True when the stride bottomed out and the cache holds every key; the
    /// search then never re-enters the main array.
    pub fn is_full_copy(&self) -> bool {
        self.stride == 1
    }

    /// Main-array position mirrored by cache slot `slot`.
    pub fn global_position(&self, slot: usize) -> usize {
        debug_assert!(slot < self.cached_keys.len());
        self.n - 1 - (self.cached_keys.len() - 1 - slot) * self.stride
    }

    /// Main-array position mirrored by partial slot `slot`.
    pub fn partial_global_position(&self, slot: usize) -> usize {
        debug_assert!(slot < self.partial_keys.len());
        self.n - 1 - (self.partial_keys.len() - 1 - slot) * self.stride - self.stride / 2
    }

    /// Run the cache phase, then translate the cache offset back to the main
    /// array. Returns (main offset, remaining step width).
    fn cache_phase<S: ProbeSink>(&self, key: K, sink: &mut S) -> (usize, usize) {
        let len = self.cached_keys.len();
        let c = descend(
            &self.cached_keys,
            0,
            SearchCursor::start(len),
            key,
            Region::Pinned,
            sink,
        );
        let from_top = len - 1 - c;
        (self.n - 1 - from_top * self.stride, self.stride >> 1)
    }

    /// Offset search answering the first `steps` levels from the cache.
    /// Agrees with [`SortedKeys::offset_search`] on every key.
    pub fn search_steps_pinned(&self, keys: &SortedKeys<K>, key: K) -> usize {
        self.search_steps_pinned_with(keys, key, &mut NoTrace)
    }

    pub fn search_steps_pinned_with<S: ProbeSink>(
        &self,
        keys: &SortedKeys<K>,
        key: K,
        sink: &mut S,
    ) -> usize {
        assert_eq!(keys.len(), self.n, "cache was built for a different array");
        let (offset, step) = self.cache_phase(key, sink);
        descend(
            keys.as_slice(),
            0,
            SearchCursor::resume(offset, step),
            key,
            Region::Main,
            sink,
        )
    }

    /// Offset search that additionally answers the first step after the cache
    /// phase from the partial entries when one is available.
    /// Agrees with [`SortedKeys::offset_search`] on every key.
    pub fn search_full_pinned(&self, keys: &SortedKeys<K>, key: K) -> usize {
        self.search_full_pinned_with(keys, key, &mut NoTrace)
    }

    pub fn search_full_pinned_with<S: ProbeSink>(
        &self,
        keys: &SortedKeys<K>,
        key: K,
        sink: &mut S,
    ) -> usize {
        assert_eq!(keys.len(), self.n, "cache was built for a different array");
        let (mut offset, mut step) = self.cache_phase(key, sink);
        // Partial slots mirror positions offset - stride/2 for the topmost
        // landing offsets; from_top indexes them from the high end.
        let from_top = (self.n - 1 - offset) / self.stride;
        if from_top < self.partial_keys.len() {
            let slot = self.partial_keys.len() - 1 - from_top;
            sink.record(Region::Partial, slot);
            debug_assert_eq!(offset - step, self.partial_global_position(slot));
            if self.partial_keys[slot] >= key {
                offset -= step;
            }
            step >>= 1;
        }
        descend(
            keys.as_slice(),
            0,
            SearchCursor::resume(offset, step),
            key,
            Region::Main,
            sink,
        )
    }
}
