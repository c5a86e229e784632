use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::batch::LookupBatch;
use crate::error::Error;
use crate::key::SearchKey;
use crate::search::SortedKeys;

/// Submission order of the lookup stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LookupOrder {
    Random,
    Sorted,
}

impl LookupOrder {
    pub fn as_str(self) -> &'static str {
        match self {
            LookupOrder::Random => "random",
            LookupOrder::Sorted => "sorted",
        }
    }
}

impl std::fmt::Display for LookupOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for LookupOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random" => Ok(LookupOrder::Random),
            "sorted" => Ok(LookupOrder::Sorted),
            other => Err(Error::InvalidConfig(format!(
                "unknown lookup order {other:?}; expected random or sorted"
            ))),
        }
    }
}

/// Parameters of a generated workload. Equal specs always generate identical
/// workloads: the generator is a fixed-algorithm stream cipher RNG seeded
/// only from `seed`, so outputs are stable across platforms and runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorkloadSpec {
    /// Number of distinct keys in the array.
    pub n: usize,
    /// Number of lookups in the stream.
    pub lookups: usize,
    /// Probability that a lookup key is present in the array.
    pub hit_ratio: f64,
    pub order: LookupOrder,
    pub seed: u64,
}

/// A sorted array of distinct uniform keys plus a lookup stream over it.
#[derive(Debug, Clone)]
pub struct Workload<K> {
    pub keys: SortedKeys<K>,
    pub lookups: Vec<K>,
    pub spec: WorkloadSpec,
}

impl<K: SearchKey> Workload<K> {
    /// Draw the array by rejection sampling distinct keys uniformly from the
    /// full key domain, then draw the lookup stream: each lookup is a present
    /// key (uniform over the array) with probability `hit_ratio`, otherwise a
    /// uniform absent key. Ordering is applied to the finished stream.
    pub fn generate(spec: &WorkloadSpec) -> Result<Self, Error> {
        if spec.n == 0 {
            return Err(Error::Workload("array size must be at least 1".into()));
        }
        if spec.lookups == 0 {
            return Err(Error::Workload("lookup count must be at least 1".into()));
        }
        if !spec.hit_ratio.is_finite() || !(0.0..=1.0).contains(&spec.hit_ratio) {
            return Err(Error::Workload(format!(
                "hit ratio must lie in [0, 1], got {}",
                spec.hit_ratio
            )));
        }
        if spec.n as u128 > K::domain_size() {
            return Err(Error::Workload(format!(
                "cannot draw {} distinct keys from a domain of {}",
                spec.n,
                K::domain_size()
            )));
        }
        if spec.hit_ratio < 1.0 && spec.n as u128 == K::domain_size() {
            return Err(Error::Workload(
                "array covers the whole key domain; no absent key exists".into(),
            ));
        }

        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

        let mut seen = HashSet::with_capacity(spec.n);
        let mut raw = Vec::with_capacity(spec.n);
        while raw.len() < spec.n {
            let key = K::from_u64(rng.random::<u64>());
            if seen.insert(key) {
                raw.push(key);
            }
        }
        raw.sort_unstable();
        let keys = SortedKeys::new(raw)?;

        let mut lookups = Vec::with_capacity(spec.lookups);
        for _ in 0..spec.lookups {
            // A hit draw in [0,1) stays below 1.0, so hit_ratio 1.0 means
            // every lookup is present and 0.0 means none is.
            if rng.random::<f64>() < spec.hit_ratio {
                let i = rng.random_range(0..spec.n);
                lookups.push(keys.as_slice()[i]);
            } else {
                loop {
                    let cand = K::from_u64(rng.random::<u64>());
                    if !seen.contains(&cand) {
                        lookups.push(cand);
                        break;
                    }
                }
            }
        }
        if spec.order == LookupOrder::Sorted {
            lookups.sort_unstable();
        }

        Ok(Self {
            keys,
            lookups,
            spec: *spec,
        })
    }

    /// The lookup stream as a pipeline batch.
    pub fn lookup_batch(&self) -> LookupBatch<K> {
        LookupBatch::new(self.lookups.clone()).expect("lookup count is validated positive")
    }

    /// FNV-1a over sizes, the key array and the lookup stream, for pinning
    /// generated workloads in regression tests and across machines.
    pub fn checksum(&self) -> u64 {
        const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
        const PRIME: u64 = 0x0000_0100_0000_01b3;
        let mut h = OFFSET;
        let mut eat = |bytes: &[u8]| {
            for &b in bytes {
                h ^= u64::from(b);
                h = h.wrapping_mul(PRIME);
            }
        };
        eat(&(self.keys.len() as u64).to_le_bytes());
        eat(&(self.lookups.len() as u64).to_le_bytes());
        for &k in self.keys.as_slice() {
            eat(&k.to_u64().to_le_bytes()[..K::BYTES]);
        }
        for &k in &self.lookups {
            eat(&k.to_u64().to_le_bytes()[..K::BYTES]);
        }
        h
    }
}
