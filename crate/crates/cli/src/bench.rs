use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use searchlab_core::{
    run_pipeline, AnySearcher, BuildParams, ExecConfig, LookupBatch, LookupOrder, SearchKey,
    Searcher, SlotResult, Variant, Workload, WorkloadSpec,
};

use crate::error::CliError;

/// Exact column layout of bench CSV output. build_ns and lookup_ns are
/// medians over the repetitions; throughput is lookups per second derived
/// from the median lookup time; footprint_bytes covers the base array plus
/// all auxiliary entries.
pub const CSV_HEADER: &str = "variant,n,lookups,k,leaf_chunk,pin_budget,workers,sort_batch,schedule,reorder,order,seed,reps,build_ns,lookup_ns,throughput,footprint_bytes,overhead_ratio";

#[derive(Debug, Clone)]
pub struct BenchOptions {
    pub variants: Vec<Variant>,
    /// Array sizes to sweep, as exponents: n = 2^e.
    pub n_log2: Vec<u32>,
    /// Lookup count exponent; `None` means m = 2n.
    pub lookups_log2: Option<u32>,
    pub hit_ratio: f64,
    pub order: LookupOrder,
    pub seed: u64,
    pub reps: usize,
    pub build: BuildParams,
    pub exec: ExecConfig,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self {
            variants: Variant::ALL.to_vec(),
            n_log2: (15..=24).collect(),
            lookups_log2: None,
            hit_ratio: 1.0,
            order: LookupOrder::Random,
            seed: 42,
            reps: 5,
            build: BuildParams::default(),
            exec: ExecConfig::default(),
        }
    }
}

impl BenchOptions {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.variants.is_empty() {
            return Err(CliError::Config("no variants selected".into()));
        }
        if self.n_log2.is_empty() {
            return Err(CliError::Config("no array sizes selected".into()));
        }
        if let Some(&e) = self
            .n_log2
            .iter()
            .chain(&self.lookups_log2)
            .find(|&&e| e >= 32)
        {
            return Err(CliError::Config(format!(
                "2^{e} exceeds the supported size range (exponents must be below 32)"
            )));
        }
        if self.reps < 3 {
            return Err(CliError::Config(format!(
                "reps must be at least 3 so medians are meaningful, got {}",
                self.reps
            )));
        }
        self.exec.validate()?;
        Ok(())
    }
}

/// One emitted measurement. Enum-valued fields are stored in their CLI
/// spelling so CSV and JSON rows match the flag vocabulary.
#[derive(Debug, Clone, serde::Serialize)]
pub struct BenchRecord {
    pub variant: String,
    pub n: usize,
    pub lookups: usize,
    pub k: usize,
    pub leaf_chunk: usize,
    pub pin_budget: usize,
    pub workers: usize,
    pub sort_batch: usize,
    pub schedule: String,
    pub reorder: String,
    pub order: String,
    pub seed: u64,
    pub reps: usize,
    pub build_ns: u64,
    pub lookup_ns: u64,
    pub throughput: f64,
    pub footprint_bytes: u64,
    pub overhead_ratio: f64,
}

impl BenchRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{:.3},{},{:.6}",
            self.variant,
            self.n,
            self.lookups,
            self.k,
            self.leaf_chunk,
            self.pin_budget,
            self.workers,
            self.sort_batch,
            self.schedule,
            self.reorder,
            self.order,
            self.seed,
            self.reps,
            self.build_ns,
            self.lookup_ns,
            self.throughput,
            self.footprint_bytes,
            self.overhead_ratio,
        )
    }
}

fn median_ns(mut samples: Vec<u64>) -> u64 {
    samples.sort_unstable();
    samples[samples.len() / 2]
}

/// Sweep the grid (every selected n times every selected variant), timing
/// builds and pipeline runs. Grid points whose structure cannot be built
/// under the given parameters are skipped with a diagnostic line on `diag`
/// instead of producing a record.
pub fn bench_run(opts: &BenchOptions, diag: &mut dyn Write) -> Result<Vec<BenchRecord>, CliError> {
    opts.validate()?;
    let mut records = Vec::new();
    for &exp in &opts.n_log2 {
        let n = 1usize << exp;
        let m = 1usize << opts.lookups_log2.unwrap_or(exp + 1);
        let spec = WorkloadSpec {
            n,
            lookups: m,
            hit_ratio: opts.hit_ratio,
            order: opts.order,
            seed: opts.seed,
        };
        let workload = Workload::<u32>::generate(&spec)?;
        let batch = workload.lookup_batch();
        for &variant in &opts.variants {
            match bench_point(variant, &workload, &batch, opts) {
                Ok(record) => records.push(record),
                Err(CliError::Config(reason)) => {
                    writeln!(diag, "# skipped variant={variant} n={n}: {reason}")?;
                }
                Err(other) => return Err(other),
            }
        }
    }
    Ok(records)
}

fn bench_point(
    variant: Variant,
    workload: &Workload<u32>,
    batch: &LookupBatch<u32>,
    opts: &BenchOptions,
) -> Result<BenchRecord, CliError> {
    let mut build_times = Vec::with_capacity(opts.reps);
    let mut lookup_times = Vec::with_capacity(opts.reps);
    let mut results = Vec::new();
    let mut aux_entries = 0;
    for _ in 0..opts.reps {
        let t = Instant::now();
        let searcher = AnySearcher::build(variant, &workload.keys, &opts.build)?;
        build_times.push(t.elapsed().as_nanos() as u64);
        aux_entries = searcher.aux_entries();

        let t = Instant::now();
        results = run_pipeline(&searcher, batch, &opts.exec)?;
        lookup_times.push(t.elapsed().as_nanos() as u64);
    }
    spot_check(workload, batch, &results, opts.seed)?;

    let n = workload.keys.len();
    let m = batch.len();
    let lookup_ns = median_ns(lookup_times);
    Ok(BenchRecord {
        variant: variant.to_string(),
        n,
        lookups: m,
        k: opts.build.fan_out,
        leaf_chunk: opts.build.leaf_chunk,
        pin_budget: opts.build.pin_budget_slots,
        workers: opts.exec.workers,
        sort_batch: opts.exec.sort_batch,
        schedule: opts.exec.schedule.to_string(),
        reorder: opts.exec.reorder.to_string(),
        order: opts.order.to_string(),
        seed: opts.seed,
        reps: opts.reps,
        build_ns: median_ns(build_times),
        lookup_ns,
        throughput: m as f64 * 1e9 / lookup_ns.max(1) as f64,
        footprint_bytes: ((n + aux_entries) * <u32 as SearchKey>::BYTES) as u64,
        overhead_ratio: aux_entries as f64 / n as f64,
    })
}

/// Re-resolve 1024 randomly chosen slots sequentially and compare. Guards
/// the timed path against silently wrong results in every benchmark run.
fn spot_check(
    workload: &Workload<u32>,
    batch: &LookupBatch<u32>,
    results: &[SlotResult],
    seed: u64,
) -> Result<(), CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5f37_59df_4b2d_91c3);
    let keys = batch.keys();
    for _ in 0..1024.min(keys.len()) {
        let slot = rng.random_range(0..keys.len());
        let expected = SlotResult::from_find(workload.keys.find(keys[slot]));
        if results[slot] != expected {
            return Err(CliError::Check(format!(
                "spot check mismatch at slot {slot}: key {} resolved to {:?}, expected {:?}",
                keys[slot],
                results[slot].index(),
                expected.index()
            )));
        }
    }
    Ok(())
}

/// Emit records as CSV (fixed header) or JSON lines.
pub fn emit_records(
    records: &[BenchRecord],
    format: OutputFormat,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    match format {
        OutputFormat::Csv => {
            writeln!(out, "{CSV_HEADER}")?;
            for r in records {
                writeln!(out, "{}", r.csv_row())?;
            }
        }
        OutputFormat::Json => {
            for r in records {
                serde_json::to_writer(&mut *out, r)
                    .map_err(|e| CliError::Check(format!("json serialization failed: {e}")))?;
                writeln!(out)?;
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

impl std::str::FromStr for OutputFormat {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(CliError::Config(format!(
                "unknown format {other:?}; expected csv or json"
            ))),
        }
    }
}
