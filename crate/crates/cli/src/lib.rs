//! Engine behind the `searchlab` binary: benchmark sweeps, the cross-variant
//! verification suite, trace dumps and workload generation. The binary is a
//! thin argument-parsing layer over these functions so integration tests can
//! drive them directly.

mod bench;
mod error;
mod gen;
mod tracedump;
mod verify;

pub use bench::{bench_run, emit_records, BenchOptions, BenchRecord, OutputFormat, CSV_HEADER};
pub use error::CliError;
pub use gen::{gen_run, GenOptions};
pub use tracedump::{trace_run, TraceOptions, TRACE_HEADER};
pub use verify::{
    check_searcher, reference_lower_bound, verify_run, Counterexample, VerifyOptions, VerifyReport,
};

/// Parse an exponent or inclusive exponent range: "20", "15-24" or "15..24".
pub fn parse_log2_range(s: &str) -> Result<Vec<u32>, CliError> {
    let err = || {
        CliError::Config(format!(
            "bad size exponent {s:?}; expected an integer like 20 or a range like 15-24"
        ))
    };
    let (lo, hi) = if let Some((a, b)) = s.split_once("..") {
        (a, b)
    } else if let Some((a, b)) = s.split_once('-') {
        (a, b)
    } else {
        let v: u32 = s.trim().parse().map_err(|_| err())?;
        return Ok(vec![v]);
    };
    let lo: u32 = lo.trim().parse().map_err(|_| err())?;
    let hi: u32 = hi.trim().parse().map_err(|_| err())?;
    if lo > hi {
        return Err(err());
    }
    Ok((lo..=hi).collect())
}
