use crate::error::Error;
use crate::key::SearchKey;
use crate::trace::{NoTrace, ProbeSink, Region};

/// Largest power of two less than or equal to `n`.
///
/// Computed from the bit width, not by looping. Panics on 0: a search over an
/// empty range has no meaningful starting step.
#[inline]
pub fn lpow2(n: usize) -> usize {
    assert!(n > 0, "lpow2 requires n >= 1");
    1usize << (usize::BITS - 1 - n.leading_zeros())
}

/// Resumable state of the offset descent: current candidate `offset` and the
/// next jump width `step`. `step` is always zero or a power of two.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchCursor {
    pub offset: usize,
    pub step: usize,
}

impl SearchCursor {
    /// Cursor for a fresh search over `len` keys: offset at the last element,
    /// step at the largest power of two that fits the array.
    pub fn start(len: usize) -> Self {
        Self {
            offset: len - 1,
            step: lpow2(len),
        }
    }

    /// Re-enter the descent mid-way, e.g. after a cached prefix resolved the
    /// leading steps.
    pub fn resume(offset: usize, step: usize) -> Self {
        debug_assert!(step == 0 || step.is_power_of_two());
        Self { offset, step }
    }
}

/// Core descent loop shared by every variant. Runs the cursor down to step 0
/// over `keys`, never probing below `lo`, reporting each probe to `sink`
/// tagged with `region`. Returns the final offset.
///
/// The loop invariant is one-sided: keys[offset] >= key whenever any probed
/// position satisfied it, and offset only ever decreases. The result is the
/// smallest reachable index whose key is >= the needle; if no key qualifies
/// the offset never moves and the initial position comes back unchanged.
#[inline]
pub(crate) fn descend<K: SearchKey, S: ProbeSink>(
    keys: &[K],
    lo: usize,
    mut cursor: SearchCursor,
    key: K,
    region: Region,
    sink: &mut S,
) -> usize {
    debug_assert!(cursor.offset < keys.len());
    while cursor.step > 0 {
        // Guard keeps offset - step inside [lo, offset); step still halves on
        // skipped iterations so every power of two gets its turn.
        if lo + cursor.step <= cursor.offset {
            let probe = cursor.offset - cursor.step;
            sink.record(region, probe);
            // SAFETY: lo <= probe < cursor.offset < keys.len() by the guard
            // above and the entry debug_assert; offset only decreases.
            if unsafe { *keys.get_unchecked(probe) } >= key {
                cursor.offset = probe;
            }
        }
        cursor.step >>= 1;
    }
    cursor.offset
}

/// Offset search restricted to `keys[lo..hi)`, with step sized to the range.
/// `hi` must be greater than `lo` and at most `keys.len()`.
#[inline]
pub(crate) fn descend_range<K: SearchKey, S: ProbeSink>(
    keys: &[K],
    lo: usize,
    hi: usize,
    key: K,
    sink: &mut S,
) -> usize {
    debug_assert!(lo < hi && hi <= keys.len());
    let cursor = SearchCursor {
        offset: hi - 1,
        step: lpow2(hi - lo),
    };
    descend(keys, lo, cursor, key, Region::Main, sink)
}

/// Collects main-array probe positions only.
struct PositionSink(Vec<usize>);

impl ProbeSink for PositionSink {
    fn record(&mut self, _region: Region, position: usize) {
        self.0.push(position);
    }
}

/// Non-empty ascending key array. Ties are allowed; every search variant in
/// this crate runs against one of these.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortedKeys<K> {
    keys: Vec<K>,
}

impl<K: SearchKey> SortedKeys<K> {
    /// Wrap an already-sorted array. Rejects empty input and any descending
    /// adjacent pair (the reported index is the later element of the pair).
    pub fn new(keys: Vec<K>) -> Result<Self, Error> {
        if keys.is_empty() {
            return Err(Error::EmptyKeys);
        }
        if let Some(i) = keys.windows(2).position(|w| w[0] > w[1]) {
            return Err(Error::UnsortedKeys(i + 1));
        }
        Ok(Self { keys })
    }

    /// Sort then wrap. Never returns `UnsortedKeys`.
    pub fn from_unsorted(mut keys: Vec<K>) -> Result<Self, Error> {
        keys.sort_unstable();
        Self::new(keys)
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    /// Always false; emptiness is rejected at construction.
    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn as_slice(&self) -> &[K] {
        &self.keys
    }

    /// Offset descent from the top of the array. Returns the smallest index
    /// holding a key >= `key`, or `len - 1` when every key is smaller.
    pub fn offset_search(&self, key: K) -> usize {
        self.offset_search_with(key, &mut NoTrace)
    }

    /// Same as [`offset_search`](Self::offset_search) but reports every probe.
    pub fn offset_search_with<S: ProbeSink>(&self, key: K, sink: &mut S) -> usize {
        descend(
            &self.keys,
            0,
            SearchCursor::start(self.keys.len()),
            key,
            Region::Main,
            sink,
        )
    }

    /// Index of the first key >= `key`, or `len` when no key qualifies.
    pub fn lower_bound(&self, key: K) -> usize {
        let i = self.offset_search(key);
        if self.keys[i] >= key {
            i
        } else {
            self.keys.len()
        }
    }

    /// Index of the first key equal to `key`, if present.
    pub fn find(&self, key: K) -> Option<usize> {
        let i = self.lower_bound(key);
        if i < self.keys.len() && self.keys[i] == key {
            Some(i)
        } else {
            None
        }
    }

    /// Main-array positions the offset descent probes for `key`, in order.
    pub fn probe_positions(&self, key: K) -> Vec<usize> {
        let mut sink = PositionSink(Vec::new());
        self.offset_search_with(key, &mut sink);
        sink.0
    }
}
