use std::io::Write;

use searchlab_core::{LookupOrder, Workload, WorkloadSpec};

use crate::bench::OutputFormat;
use crate::error::CliError;

#[derive(Debug, Clone)]
pub struct GenOptions {
    pub n_log2: u32,
    pub lookups_log2: u32,
    pub hit_ratio: f64,
    pub order: LookupOrder,
    pub seed: u64,
    pub format: OutputFormat,
}

impl Default for GenOptions {
    fn default() -> Self {
        Self {
            n_log2: 16,
            lookups_log2: 17,
            hit_ratio: 1.0,
            order: LookupOrder::Random,
            seed: 42,
            format: OutputFormat::Csv,
        }
    }
}

/// Generate a workload and write it out; returns its checksum. CSV mode
/// emits `kind,value` rows (kind is `build` or `lookup`, in stream order);
/// JSON mode emits a single object with the keys inline.
pub fn gen_run(opts: &GenOptions, out: &mut dyn Write) -> Result<u64, CliError> {
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
    let checksum = workload.checksum();

    match opts.format {
        OutputFormat::Csv => {
            writeln!(out, "kind,value")?;
            for &k in workload.keys.as_slice() {
                writeln!(out, "build,{k}")?;
            }
            for &k in &workload.lookups {
                writeln!(out, "lookup,{k}")?;
            }
        }
        OutputFormat::Json => {
            let doc = serde_json::json!({
                "n": spec.n,
                "lookups": spec.lookups,
                "seed": spec.seed,
                "order": spec.order.to_string(),
                "hit_ratio": spec.hit_ratio,
                "checksum": checksum,
                "build_keys": workload.keys.as_slice(),
                "lookup_keys": workload.lookups,
            });
            serde_json::to_writer(&mut *out, &doc)
                .map_err(|e| CliError::Check(format!("json serialization failed: {e}")))?;
            writeln!(out)?;
        }
    }
    Ok(checksum)
}
