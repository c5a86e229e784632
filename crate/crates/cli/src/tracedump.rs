use std::io::Write;

use searchlab_core::{
    batch_locality, traced_search, AnySearcher, BuildParams, LocalityReport, LookupOrder,
    SearchKey, Variant, Workload, WorkloadSpec, DEFAULT_LINE_BYTES,
};

use crate::error::CliError;

/// Column layout of trace dumps: one line per probe.
pub const TRACE_HEADER: &str = "lookup_index,step_rank,region,position";

#[derive(Debug, Clone)]
pub struct TraceOptions {
    pub variant: Variant,
    pub n_log2: u32,
    pub lookups_log2: u32,
    pub hit_ratio: f64,
    pub order: LookupOrder,
    pub seed: u64,
    pub build: BuildParams,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self {
            variant: Variant::Naive,
            n_log2: 16,
            lookups_log2: 8,
            hit_ratio: 1.0,
            order: LookupOrder::Random,
            seed: 42,
            build: BuildParams::default(),
        }
    }
}

/// Trace every lookup of the generated workload through one variant, dump
/// the probe log, and summarize batch locality.
pub fn trace_run(opts: &TraceOptions, out: &mut dyn Write) -> Result<LocalityReport, CliError> {
    if opts.n_log2 >= 32 || opts.lookups_log2 >= 32 {
        return Err(CliError::Config("size exponents must be below 32".into()));
    }
    let spec = WorkloadSpec {
        n: 1 << opts.n_log2,
        lookups: 1 << opts.lookups_log2,
        hit_ratio: opts.hit_ratio,
        order: opts.order,
        seed: opts.seed,
    };
    let workload = Workload::<u32>::generate(&spec)?;
    let searcher = AnySearcher::build(opts.variant, &workload.keys, &opts.build)?;

    writeln!(out, "{TRACE_HEADER}")?;
    let mut traces = Vec::with_capacity(workload.lookups.len());
    for (lookup_index, &key) in workload.lookups.iter().enumerate() {
        let (_, trace) = traced_search(&searcher, key);
        for (step_rank, probe) in trace.probes().iter().enumerate() {
            writeln!(
                out,
                "{lookup_index},{step_rank},{},{}",
                probe.region, probe.position
            )?;
        }
        traces.push(trace);
    }
    Ok(batch_locality(
        &traces,
        DEFAULT_LINE_BYTES,
        <u32 as SearchKey>::BYTES,
    ))
}
