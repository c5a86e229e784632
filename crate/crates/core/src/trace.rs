use std::collections::{BTreeMap, HashSet};
use std::fmt;

/// Which structure a probe touched. `Level(i)` is the i-th index level
/// counted from the top (root row is level 0); leaf probes land in `Main`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Region {
    Main,
    Pinned,
    Partial,
    Level(u32),
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::Main => f.write_str("main"),
            Region::Pinned => f.write_str("pinned"),
            Region::Partial => f.write_str("partial"),
            Region::Level(i) => write!(f, "level-{i}"),
        }
    }
}

/// Observer for every comparison a search performs. Implementations must not
/// influence control flow; the search result is identical for any sink.
pub trait ProbeSink {
    fn record(&mut self, region: Region, position: usize);
}

/// Zero-cost sink for production searches. The recorder call inlines to
/// nothing, so untraced searches pay no observation overhead.
#[derive(Debug, Default, Clone, Copy)]
pub struct NoTrace;

impl ProbeSink for NoTrace {
    #[inline(always)]
    fn record(&mut self, _region: Region, _position: usize) {}
}

/// One recorded comparison: the region probed and the position within it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Probe {
    pub region: Region,
    pub position: usize,
}

/// Ordered log of every probe one lookup performed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AccessTrace {
    probes: Vec<Probe>,
}

impl AccessTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.probes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probes.is_empty()
    }

    pub fn probes(&self) -> &[Probe] {
        &self.probes
    }

    /// Positions of probes that touched `region`, in probe order.
    pub fn positions_in(&self, region: Region) -> Vec<usize> {
        self.probes
            .iter()
            .filter(|p| p.region == region)
            .map(|p| p.position)
            .collect()
    }
}

impl ProbeSink for AccessTrace {
    #[inline]
    fn record(&mut self, region: Region, position: usize) {
        self.probes.push(Probe { region, position });
    }
}

/// Length of the longest common prefix of two probe logs. Both region and
/// position must match for a step to count.
pub fn shared_prefix(a: &AccessTrace, b: &AccessTrace) -> usize {
    a.probes
        .iter()
        .zip(&b.probes)
        .take_while(|(x, y)| x == y)
        .count()
}

/// Cache-behavior summary of a batch of traces.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalityReport {
    /// Mean shared-prefix length over adjacent trace pairs, in submission
    /// order. A batch of one trace has no pairs and reports 0.0.
    pub mean_shared_prefix: f64,
    /// For each step rank r: how many distinct cache lines the r-th
    /// main-region probe of each trace touched across the batch.
    pub distinct_lines_per_step: Vec<usize>,
    /// Total probes per region across the batch.
    pub region_access_counts: BTreeMap<Region, usize>,
}

/// Default cache-line size assumed by locality accounting.
pub const DEFAULT_LINE_BYTES: usize = 64;

/// Summarize how much a batch of lookups shared its probe paths.
///
/// `line_bytes` and `key_bytes` translate main-array positions into cache
/// lines: position p lives on line floor(p * key_bytes / line_bytes).
pub fn batch_locality(
    traces: &[AccessTrace],
    line_bytes: usize,
    key_bytes: usize,
) -> LocalityReport {
    assert!(line_bytes > 0, "cache line size must be positive");
    assert!(key_bytes > 0, "key size must be positive");

    let mean_shared_prefix = if traces.len() < 2 {
        0.0
    } else {
        let total: usize = traces.windows(2).map(|w| shared_prefix(&w[0], &w[1])).sum();
        total as f64 / (traces.len() - 1) as f64
    };

    let mut region_access_counts = BTreeMap::new();
    let mut per_step_lines: Vec<HashSet<usize>> = Vec::new();
    for trace in traces {
        let mut main_rank = 0;
        for probe in trace.probes() {
            *region_access_counts.entry(probe.region).or_insert(0) += 1;
            if probe.region == Region::Main {
                if per_step_lines.len() <= main_rank {
                    per_step_lines.resize_with(main_rank + 1, HashSet::new);
                }
                per_step_lines[main_rank].insert(probe.position * key_bytes / line_bytes);
                main_rank += 1;
            }
        }
    }

    LocalityReport {
        mean_shared_prefix,
        distinct_lines_per_step: per_step_lines.iter().map(HashSet::len).collect(),
        region_access_counts,
    }
}
