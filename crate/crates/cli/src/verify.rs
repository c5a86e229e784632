use std::fmt;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use searchlab_core::{
    run_pipeline, ExecConfig, FullPinnedSearcher, KarySearcher, LookupBatch, NaiveSearcher,
    Reorder, Schedule, Searcher, SlotResult, SortedKeys, StepsPinnedSearcher,
};

use crate::error::CliError;

/// Pin budgets and index shapes exercised against every generated array.
/// `usize::MAX` is replaced by the array length (full-copy budget).
const BUDGETS: [usize; 7] = [2, 3, 4, 6, 64, 1024, usize::MAX];
const KARY_SHAPES: [(usize, usize); 20] = [
    (2, 1),
    (2, 3),
    (2, 16),
    (2, 32),
    (3, 1),
    (3, 3),
    (3, 16),
    (3, 32),
    (5, 1),
    (5, 3),
    (5, 16),
    (5, 32),
    (17, 1),
    (17, 3),
    (17, 16),
    (17, 32),
    (33, 1),
    (33, 3),
    (33, 16),
    (33, 32),
];

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Rounds; round r uses seed + r so failures reproduce from one value.
    pub rounds: usize,
    /// Largest array size exponent; sizes are drawn from [1, 2^this].
    pub max_n_log2: u32,
    pub arrays_per_round: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: 1,
            rounds: 25,
            max_n_log2: 12,
            arrays_per_round: 40,
        }
    }
}

/// A reproducible failed check: rerunning with this seed regenerates the
/// array and the key that disagreed with the reference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub check: &'static str,
    pub variant: String,
    pub seed: u64,
    pub n: usize,
    pub key: u32,
    pub expected: Option<usize>,
    pub got: Option<usize>,
}

fn fmt_slot(v: Option<usize>) -> String {
    match v {
        Some(i) => i.to_string(),
        None => "absent".into(),
    }
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} mismatch: variant={} seed={} n={} key={}: expected {}, got {}",
            self.check,
            self.variant,
            self.seed,
            self.n,
            self.key,
            fmt_slot(self.expected),
            fmt_slot(self.got),
        )
    }
}

#[derive(Debug, Default)]
pub struct VerifyReport {
    pub arrays: usize,
    pub checks: u64,
    pub counterexamples: Vec<Counterexample>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// The one implementation everything is measured against: a forward scan
/// with no shared code or ideas with the descent loop.
pub fn reference_lower_bound(keys: &[u32], key: u32) -> usize {
    for (i, &v) in keys.iter().enumerate() {
        if v >= key {
            return i;
        }
    }
    keys.len()
}

/// Check one searcher over the probe set against the linear-scan reference.
/// Returns (checks performed, counterexamples); exposed so harnesses can run
/// it against deliberately corrupted structures.
pub fn check_searcher<S: Searcher<u32>>(
    seed: u64,
    variant: &str,
    raw: &[u32],
    searcher: &S,
    probe_keys: &[u32],
) -> (u64, Vec<Counterexample>) {
    let expected = reference_pairs(raw, probe_keys);
    check_against(seed, variant, raw, searcher, &expected)
}

/// Reference answers for a probe set, computed once per array so the O(n)
/// scan is not repeated for every searcher sharing that array.
fn reference_pairs(raw: &[u32], probe_keys: &[u32]) -> Vec<(u32, usize)> {
    probe_keys
        .iter()
        .map(|&key| (key, reference_lower_bound(raw, key)))
        .collect()
}

fn check_against<S: Searcher<u32>>(
    seed: u64,
    variant: &str,
    raw: &[u32],
    searcher: &S,
    expected: &[(u32, usize)],
) -> (u64, Vec<Counterexample>) {
    let mut checks = 0;
    let mut bad = Vec::new();
    for &(key, lb) in expected {
        let expected_find = (lb < raw.len() && raw[lb] == key).then_some(lb);

        let got_lb = searcher.lower_bound(key);
        checks += 1;
        if got_lb != lb {
            bad.push(Counterexample {
                check: "lower_bound",
                variant: variant.into(),
                seed,
                n: raw.len(),
                key,
                expected: Some(lb),
                got: Some(got_lb),
            });
            continue;
        }

        let got_find = searcher.find(key);
        checks += 1;
        if got_find != expected_find {
            bad.push(Counterexample {
                check: "find",
                variant: variant.into(),
                seed,
                n: raw.len(),
                key,
                expected: expected_find,
                got: got_find,
            });
        }
    }
    (checks, bad)
}

/// Sorted array with duplicates in one of a few shapes, so both dense
/// duplicate runs and wide sparse domains get coverage.
fn gen_array(rng: &mut ChaCha8Rng, max_n: usize) -> Vec<u32> {
    let n = rng.random_range(1..=max_n);
    let mut raw: Vec<u32> = match rng.random_range(0..4u32) {
        // Narrow domain: duplicates almost guaranteed.
        0 => (0..n)
            .map(|_| rng.random_range(0..(2 * n as u32 + 1)))
            .collect(),
        // Full domain.
        1 => (0..n).map(|_| rng.random()).collect(),
        // Dense run with a random base, adjacent values differ by 0..=2.
        2 => {
            let mut v = rng.random_range(0..u32::MAX / 2);
            (0..n)
                .map(|_| {
                    v = v.saturating_add(rng.random_range(0..=2));
                    v
                })
                .collect()
        }
        // Plateaus: few distinct values in long repeats.
        _ => {
            let distinct = rng.random_range(1..=8u32);
            (0..n)
                .map(|_| rng.random_range(0..distinct) * 1000)
                .collect()
        }
    };
    raw.sort_unstable();
    raw
}

/// Present keys plus at least 100 absent ones: below the minimum, above the
/// maximum, in gaps between adjacent values, and random misses.
fn probe_keys(rng: &mut ChaCha8Rng, raw: &[u32]) -> Vec<u32> {
    let mut keys: Vec<u32> = raw.to_vec();
    let contains = |k: u32| raw.binary_search(&k).is_ok();

    let mut absent = Vec::with_capacity(128);
    let push_absent = |k: u32, absent: &mut Vec<u32>| {
        if !contains(k) {
            absent.push(k);
        }
    };
    let min = raw[0];
    let max = raw[raw.len() - 1];
    if min > 0 {
        push_absent(0, &mut absent);
        push_absent(min - 1, &mut absent);
    }
    if max < u32::MAX {
        push_absent(max + 1, &mut absent);
        push_absent(u32::MAX, &mut absent);
    }
    for w in raw.windows(2).take(64) {
        if w[1] - w[0] >= 2 {
            push_absent(w[0] + (w[1] - w[0]) / 2, &mut absent);
        }
    }
    let mut attempts = 0;
    while absent.len() < 100 && attempts < 100_000 {
        push_absent(rng.random(), &mut absent);
        attempts += 1;
    }
    keys.extend(absent);
    keys
}

fn budgets_for(n: usize) -> Vec<usize> {
    let mut budgets: Vec<usize> = BUDGETS
        .iter()
        .map(|&b| if b == usize::MAX { n.max(2) } else { b })
        .collect();
    budgets.sort_unstable();
    budgets.dedup();
    budgets
}

/// Run the full cross-variant equivalence suite: every variant checked
/// against the linear-scan reference over randomized arrays, plus a pipeline
/// invariance spot check per round and the n=1 edge sweep.
pub fn verify_run(opts: &VerifyOptions, log: &mut dyn Write) -> Result<VerifyReport, CliError> {
    if opts.rounds == 0 || opts.arrays_per_round == 0 {
        return Err(CliError::Config(
            "verify needs at least one round and one array per round".into(),
        ));
    }
    if opts.max_n_log2 >= 32 {
        return Err(CliError::Config(
            "verify array exponent must be below 32".into(),
        ));
    }
    let max_n = 1usize << opts.max_n_log2;
    let mut report = VerifyReport::default();

    for round in 0..opts.rounds {
        let seed = opts.seed.wrapping_add(round as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for array_idx in 0..opts.arrays_per_round {
            // First two arrays of each round pin the degenerate sizes.
            let raw = match array_idx {
                0 => vec![rng.random::<u32>()],
                1 => {
                    let mut v = vec![rng.random::<u32>(), rng.random::<u32>()];
                    v.sort_unstable();
                    v
                }
                _ => gen_array(&mut rng, max_n),
            };
            let keys = SortedKeys::new(raw.clone())?;
            let probes = probe_keys(&mut rng, &raw);
            check_array(seed, &raw, &keys, &probes, &mut report);
            report.arrays += 1;
        }
        pipeline_invariance_check(seed, &mut rng, max_n, &mut report)?;
        if !report.passed() {
            break;
        }
    }

    for c in &report.counterexamples {
        writeln!(log, "counterexample: {c}")?;
    }
    writeln!(
        log,
        "verified {} arrays, {} checks: {}",
        report.arrays,
        report.checks,
        if report.passed() { "ok" } else { "FAILED" }
    )?;
    Ok(report)
}

fn check_array(
    seed: u64,
    raw: &[u32],
    keys: &SortedKeys<u32>,
    probes: &[u32],
    report: &mut VerifyReport,
) {
    let expected = reference_pairs(raw, probes);
    let mut run = |checks: u64, bad: Vec<Counterexample>| {
        report.checks += checks;
        report.counterexamples.extend(bad);
    };

    let naive = NaiveSearcher::new(keys);
    let (c, bad) = check_against(seed, "naive", raw, &naive, &expected);
    run(c, bad);

    for budget in budgets_for(raw.len()) {
        let steps = StepsPinnedSearcher::new(keys, budget).expect("budget >= 2");
        let label = format!("steps-pinned/b{budget}");
        let (c, bad) = check_against(seed, &label, raw, &steps, &expected);
        run(c, bad);

        let full = FullPinnedSearcher::new(keys, budget).expect("budget >= 2");
        let label = format!("full-pinned/b{budget}");
        let (c, bad) = check_against(seed, &label, raw, &full, &expected);
        run(c, bad);
    }

    for (k, leaf) in KARY_SHAPES {
        let kary = KarySearcher::new(keys, k, leaf).expect("valid shape");
        let label = format!("kary/k{k}/c{leaf}");
        let (c, bad) = check_against(seed, &label, raw, &kary, &expected);
        run(c, bad);
    }
}

/// One pipeline run per round: two differently-scheduled executions must
/// agree with the sequential map exactly.
fn pipeline_invariance_check(
    seed: u64,
    rng: &mut ChaCha8Rng,
    max_n: usize,
    report: &mut VerifyReport,
) -> Result<(), CliError> {
    let raw = gen_array(rng, max_n);
    let keys = SortedKeys::new(raw)?;
    let n = keys.len();
    let lookups: Vec<u32> = (0..rng.random_range(1..=512))
        .map(|_| {
            if rng.random::<f64>() < 0.8 {
                keys.as_slice()[rng.random_range(0..n)]
            } else {
                rng.random()
            }
        })
        .collect();
    let batch = LookupBatch::new(lookups.clone())?;
    let searcher = NaiveSearcher::new(&keys);

    let pick = |r: &mut ChaCha8Rng| ExecConfig {
        workers: r.random_range(1..=4),
        sort_batch: 8 << r.random_range(0..4u32),
        stage_per_worker: 8,
        schedule: Schedule::ALL[r.random_range(0..3)],
        reorder: Reorder::ALL[r.random_range(0..3)],
    };
    let a = run_pipeline(&searcher, &batch, &pick(rng))?;
    let b = run_pipeline(&searcher, &batch, &pick(rng))?;
    for (slot, &key) in lookups.iter().enumerate() {
        let expected = SlotResult::from_find(keys.find(key));
        report.checks += 2;
        for got in [a[slot], b[slot]] {
            if got != expected {
                report.counterexamples.push(Counterexample {
                    check: "pipeline",
                    variant: "naive".into(),
                    seed,
                    n,
                    key,
                    expected: expected.index(),
                    got: got.index(),
                });
            }
        }
    }
    Ok(())
}
