use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process;

use clap::{Args, Parser, Subcommand};
use searchlab_cli::{
    bench_run, emit_records, gen_run, parse_log2_range, trace_run, verify_run, BenchOptions,
    CliError, GenOptions, OutputFormat, TraceOptions, VerifyOptions,
};
use searchlab_core::{BuildParams, ExecConfig, LookupOrder, Reorder, Schedule, Variant};

#[derive(Parser)]
#[command(
    name = "searchlab",
    version,
    about = "Benchmark, verify, trace and generate batched sorted-array search workloads"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct WorkloadArgs {
    /// Workload RNG seed; all non-time outputs are functions of it
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Lookup submission order
    #[arg(long, default_value = "random", value_parser = parse_order)]
    order: LookupOrder,
    /// Fraction of lookups drawn from the array
    #[arg(long, default_value_t = 1.0)]
    hit_ratio: f64,
}

#[derive(Args)]
struct StructureArgs {
    /// Separator-index fan-out K
    #[arg(long, default_value_t = 17)]
    k: usize,
    /// Keys per separator-index leaf chunk
    #[arg(long, default_value_t = 32)]
    leaf_chunk: usize,
    /// Cache slots available to the pinned variants (100 KiB of u32 keys)
    #[arg(long, default_value_t = 25_600)]
    pin_budget_slots: usize,
}

impl StructureArgs {
    fn build_params(&self) -> BuildParams {
        BuildParams {
            pin_budget_slots: self.pin_budget_slots,
            fan_out: self.k,
            leaf_chunk: self.leaf_chunk,
        }
    }
}

#[derive(Args)]
struct PipelineArgs {
    /// Worker threads (default: SEARCHLAB_THREADS, else all cores)
    #[arg(long)]
    workers: Option<usize>,
    /// Lookups per sort batch
    #[arg(long, default_value_t = 1024)]
    sort_batch: usize,
    /// Lookups a worker stages together before searching
    #[arg(long, default_value_t = 8)]
    stage: usize,
    /// Batch-to-worker assignment
    #[arg(long, default_value = "static-contiguous", value_parser = parse_schedule)]
    schedule: Schedule,
    /// Batch sorting and result restoration mode
    #[arg(long, default_value = "none", value_parser = parse_reorder)]
    reorder: Reorder,
}

impl PipelineArgs {
    fn exec_config(&self) -> Result<ExecConfig, CliError> {
        Ok(ExecConfig {
            workers: resolve_workers(self.workers)?,
            sort_batch: self.sort_batch,
            stage_per_worker: self.stage,
            schedule: self.schedule,
            reorder: self.reorder,
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Time variant builds and batched lookups over a size sweep
    Bench {
        /// Variants to run (comma-separated)
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "naive,steps-pinned,full-pinned,kary",
            value_parser = parse_variant
        )]
        variant: Vec<Variant>,
        /// Array size exponent or inclusive range, e.g. 20 or 15-24
        #[arg(long, default_value = "15-24")]
        n_log2: String,
        /// Lookup count exponent (default: n_log2 + 1, i.e. m = 2n)
        #[arg(long)]
        lookups_log2: Option<u32>,
        /// Timed repetitions per grid point (medians are reported)
        #[arg(long, default_value_t = 5)]
        reps: usize,
        #[command(flatten)]
        workload: WorkloadArgs,
        #[command(flatten)]
        structure: StructureArgs,
        #[command(flatten)]
        pipeline: PipelineArgs,
        /// Write records here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        /// csv (fixed header) or json (one object per line)
        #[arg(long, default_value = "csv", value_parser = parse_format)]
        format: OutputFormat,
    },
    /// Check every variant against a linear-scan reference on random arrays
    Verify {
        /// Base seed; round r uses seed + r
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Rounds of randomized arrays
        #[arg(long, default_value_t = 25)]
        reps: usize,
        /// Largest array size exponent (or range; the maximum is used)
        #[arg(long, default_value = "12")]
        n_log2: String,
    },
    /// Dump per-lookup probe traces for one variant
    Trace {
        #[arg(long, default_value = "naive", value_parser = parse_variant)]
        variant: Variant,
        /// Array size exponent (single value)
        #[arg(long, default_value = "16")]
        n_log2: String,
        /// Lookup count exponent
        #[arg(long, default_value_t = 8)]
        lookups_log2: u32,
        #[command(flatten)]
        workload: WorkloadArgs,
        #[command(flatten)]
        structure: StructureArgs,
        /// Write the dump here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a reproducible workload and emit it
    Gen {
        /// Array size exponent (single value)
        #[arg(long, default_value = "16")]
        n_log2: String,
        /// Lookup count exponent (default: n_log2 + 1)
        #[arg(long)]
        lookups_log2: Option<u32>,
        #[command(flatten)]
        workload: WorkloadArgs,
        /// Write the workload here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "csv", value_parser = parse_format)]
        format: OutputFormat,
    },
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse().map_err(|e: searchlab_core::Error| e.to_string())
}

fn parse_schedule(s: &str) -> Result<Schedule, String> {
    s.parse().map_err(|e: searchlab_core::Error| e.to_string())
}

fn parse_reorder(s: &str) -> Result<Reorder, String> {
    s.parse().map_err(|e: searchlab_core::Error| e.to_string())
}

fn parse_order(s: &str) -> Result<LookupOrder, String> {
    s.parse().map_err(|e: searchlab_core::Error| e.to_string())
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    s.parse().map_err(|e: CliError| e.to_string())
}

fn resolve_workers(explicit: Option<usize>) -> Result<usize, CliError> {
    let workers = match explicit {
        Some(w) => w,
        None => match std::env::var("SEARCHLAB_THREADS") {
            Ok(v) => v.trim().parse().map_err(|_| {
                CliError::Config(format!(
                    "SEARCHLAB_THREADS must be a positive integer, got {v:?}"
                ))
            })?,
            Err(_) => std::thread::available_parallelism()
                .map(std::num::NonZeroUsize::get)
                .unwrap_or(1),
        },
    };
    if workers == 0 {
        return Err(CliError::Config("worker count must be at least 1".into()));
    }
    Ok(workers)
}

fn single_exponent(s: &str, what: &str) -> Result<u32, CliError> {
    let range = parse_log2_range(s)?;
    if range.len() != 1 {
        return Err(CliError::Config(format!(
            "{what} takes a single size exponent, not a range"
        )));
    }
    Ok(range[0])
}

fn open_out(path: Option<&PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Bench {
            variant,
            n_log2,
            lookups_log2,
            reps,
            workload,
            structure,
            pipeline,
            out,
            format,
        } => {
            let opts = BenchOptions {
                variants: variant,
                n_log2: parse_log2_range(&n_log2)?,
                lookups_log2,
                hit_ratio: workload.hit_ratio,
                order: workload.order,
                seed: workload.seed,
                reps,
                build: structure.build_params(),
                exec: pipeline.exec_config()?,
            };
            let records = bench_run(&opts, &mut io::stderr())?;
            let mut writer = open_out(out.as_ref())?;
            emit_records(&records, format, &mut writer)?;
            writer.flush()?;
            Ok(0)
        }
        Command::Verify { seed, reps, n_log2 } => {
            let opts = VerifyOptions {
                seed,
                rounds: reps,
                max_n_log2: parse_log2_range(&n_log2)?
                    .into_iter()
                    .max()
                    .expect("range is non-empty"),
                ..VerifyOptions::default()
            };
            let mut stdout = io::stdout();
            let report = verify_run(&opts, &mut stdout)?;
            stdout.flush()?;
            Ok(if report.passed() { 0 } else { 1 })
        }
        Command::Trace {
            variant,
            n_log2,
            lookups_log2,
            workload,
            structure,
            out,
        } => {
            let opts = TraceOptions {
                variant,
                n_log2: single_exponent(&n_log2, "trace")?,
                lookups_log2,
                hit_ratio: workload.hit_ratio,
                order: workload.order,
                seed: workload.seed,
                build: structure.build_params(),
            };
            let mut writer = open_out(out.as_ref())?;
            let report = trace_run(&opts, &mut writer)?;
            writer.flush()?;
            eprintln!("mean shared prefix: {:.3}", report.mean_shared_prefix);
            let counts: Vec<String> = report
                .region_access_counts
                .iter()
                .map(|(region, count)| format!("{region}={count}"))
                .collect();
            eprintln!("probes by region: {}", counts.join(" "));
            eprintln!(
                "distinct lines per step: {:?}",
                report.distinct_lines_per_step
            );
            Ok(0)
        }
        Command::Gen {
            n_log2,
            lookups_log2,
            workload,
            out,
            format,
        } => {
            let n_exp = single_exponent(&n_log2, "gen")?;
            let opts = GenOptions {
                n_log2: n_exp,
                lookups_log2: lookups_log2.unwrap_or(n_exp + 1),
                hit_ratio: workload.hit_ratio,
                order: workload.order,
                seed: workload.seed,
                format,
            };
            let mut writer = open_out(out.as_ref())?;
            let checksum = gen_run(&opts, &mut writer)?;
            writer.flush()?;
            eprintln!("workload checksum: {checksum:#018x}");
            Ok(0)
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => process::exit(code),
        Err(e) => {
            eprintln!("{e}");
            process::exit(e.exit_code());
        }
    }
}
