use std::fmt::{Debug, Display};
use std::hash::Hash;

/// Fixed-width unsigned key type usable by every search variant.
///
/// The trait exists so the structures stay generic over 32- and 64-bit keys
/// while the lab code can still reason about the key domain (workload
/// generation) and raw byte width (cache-line accounting, checksums).
pub trait SearchKey: Copy + Ord + Eq + Hash + Debug + Display + Send + Sync + 'static {
    /// Largest representable key. Used as the padding sentinel for ragged
    /// index levels; a sentinel never compares below a real key.
    const MAX_VALUE: Self;

    /// Width in bytes of the in-memory representation.
    const BYTES: usize;

    /// Widen to u64. Lossless for every supported width.
    fn to_u64(self) -> u64;

    /// Truncating conversion from u64. Feeding uniform u64 bits through this
    /// yields a uniform draw over the whole key domain.
    fn from_u64(v: u64) -> Self;

    /// Number of distinct keys, as u128 so the 64-bit domain still fits.
    fn domain_size() -> u128 {
        1u128 << (Self::BYTES as u32 * 8)
    }
}

impl SearchKey for u32 {
    const MAX_VALUE: Self = u32::MAX;
    const BYTES: usize = 4;

    fn to_u64(self) -> u64 {
        u64::from(self)
    }

    fn from_u64(v: u64) -> Self {
        v as u32
    }
}

impl SearchKey for u64 {
    const MAX_VALUE: Self = u64::MAX;
    const BYTES: usize = 8;

    fn to_u64(self) -> u64 {
        self
    }

    fn from_u64(v: u64) -> Self {
        v
    }
}
