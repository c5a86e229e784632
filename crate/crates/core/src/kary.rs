use crate::error::Error;
use crate::key::SearchKey;
use crate::search::{descend_range, SortedKeys};
use crate::trace::{NoTrace, ProbeSink, Region};

/// Flat K-ary separator index over a sorted array.
///
/// Each level stores, per node, the maxima of its K child chunks except the
/// last (K-1 separators). Levels are dense arrays padded with `MAX_VALUE`
/// sentinels where the array runs out, so node arithmetic needs no pointers:
/// node m of a level spans positions [m*span, m*span + span) and its row sits
/// at [m*(K-1), (m+1)*(K-1)) in that level. Descent reads one full row per
/// level (K-1 adjacent slots) and finishes with an offset search inside a
/// single leaf chunk.
#[derive(Debug, Clone)]
pub struct KaryIndex<'a, K> {
    base: &'a SortedKeys<K>,
    /// Top level first; levels[0] is the single root row.
    levels: Vec<Vec<K>>,
    fan_out: usize,
    leaf_chunk: usize,
    /// Key positions spanned by one root node: leaf_chunk * fan_out^depth.
    top_span: usize,
}

impl<'a, K: SearchKey> KaryIndex<'a, K> {
    /// Build bottom-up over `base`. `fan_out` must be at least 2 and
    /// `leaf_chunk` at least 1; a base that fits one leaf chunk yields an
    /// empty index and descent degenerates to a plain offset search.
    pub fn build(
        base: &'a SortedKeys<K>,
        fan_out: usize,
        leaf_chunk: usize,
    ) -> Result<Self, Error> {
        if fan_out < 2 {
            return Err(Error::FanOutTooSmall(fan_out));
        }
        if leaf_chunk < 1 {
            return Err(Error::LeafChunkTooSmall(leaf_chunk));
        }
        let n = base.len();
        let mut ranges = n.div_ceil(leaf_chunk);
        let mut depth = 0;
        while ranges > 1 {
            ranges = ranges.div_ceil(fan_out);
            depth += 1;
        }

        let slice = base.as_slice();
        let mut levels = Vec::with_capacity(depth);
        let mut span = leaf_chunk;
        for _ in 0..depth {
            let child = span;
            span *= fan_out;
            let nodes = n.div_ceil(span);
            let mut level = Vec::with_capacity(nodes * (fan_out - 1));
            for m in 0..nodes {
                let node_start = m * span;
                for j in 0..fan_out - 1 {
                    let chunk_start = node_start + j * child;
                    if chunk_start >= n {
                        level.push(K::MAX_VALUE);
                    } else {
                        level.push(slice[(chunk_start + child).min(n) - 1]);
                    }
                }
            }
            levels.push(level);
        }
        levels.reverse();

        Ok(Self {
            base,
            levels,
            fan_out,
            leaf_chunk,
            top_span: span,
        })
    }

    /// The array this index descends into.
    pub fn base(&self) -> &'a SortedKeys<K> {
        self.base
    }

    pub fn fan_out(&self) -> usize {
        self.fan_out
    }

    pub fn leaf_chunk(&self) -> usize {
        self.leaf_chunk
    }

    /// Number of separator levels above the leaves.
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Separator rows, top level first.
    pub fn levels(&self) -> &[Vec<K>] {
        &self.levels
    }

    /// Total separator slots across all levels, sentinels included.
    pub fn separator_count(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    /// Index size relative to the base array, in entries (equivalently in
    /// bytes, since separators and keys share a width).
    pub fn overhead(&self) -> f64 {
        self.separator_count() as f64 / self.base.len() as f64
    }

    /// Offset-search semantics: smallest index holding a key >= `key`, or
    /// `len - 1` when every key is smaller. Agrees with
    /// [`SortedKeys::offset_search`] on every key.
    pub fn search(&self, key: K) -> usize {
        self.search_with(key, &mut NoTrace)
    }

    pub fn search_with<S: ProbeSink>(&self, key: K, sink: &mut S) -> usize {
        let n = self.base.len();
        let mut node = 0usize;
        let mut span = self.top_span;
        for (t, level) in self.levels.iter().enumerate() {
            let child = span / self.fan_out;
            let row_start = node * (self.fan_out - 1);
            let row = &level[row_start..row_start + self.fan_out - 1];
            // Chunk index = separators strictly below the key. The whole row
            // is read unconditionally; sentinels never compare below a key.
            let mut chosen = 0usize;
            for (i, &sep) in row.iter().enumerate() {
                sink.record(Region::Level(t as u32), row_start + i);
                chosen += usize::from(sep < key);
            }
            // A ragged node has trailing empty chunks; keys above every real
            // separator must land in the last chunk that holds data.
            let last_nonempty = (n - 1 - node * span) / child;
            node = node * self.fan_out + chosen.min(last_nonempty);
            span = child;
        }
        let lo = node * self.leaf_chunk;
        let hi = (lo + self.leaf_chunk).min(n);
        descend_range(self.base.as_slice(), lo, hi, key, sink)
    }

    /// Flip the low bit of one separator slot. Exists so harnesses can prove
    /// the equivalence checks catch a corrupted index; no production code
    /// path calls this.
    #[cfg(any(test, feature = "fault-injection"))]
    #[doc(hidden)]
    pub fn corrupt_separator(&mut self, level: usize, slot: usize) {
        let v = self.levels[level][slot];
        self.levels[level][slot] = K::from_u64(v.to_u64() ^ 1);
    }
}
