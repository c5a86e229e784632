//! End-to-end tests of the `searchlab` binary: flag surface, output shapes,
//! determinism and exit codes.

use std::process::{Command, Output};

use searchlab_cli::{CSV_HEADER, TRACE_HEADER};

fn searchlab(args: &[&str]) -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_searchlab"));
    cmd.args(args);
    cmd.env_remove("SEARCHLAB_THREADS");
    cmd
}

fn run(args: &[&str]) -> Output {
    searchlab(args).output().expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

const QUICK_BENCH: &[&str] = &[
    "bench",
    "--n-log2",
    "10",
    "--lookups-log2",
    "11",
    "--reps",
    "3",
    "--workers",
    "2",
    "--seed",
    "7",
];

#[test]
fn bench_emits_exact_csv_header_and_grid_rows() {
    let out = run(QUICK_BENCH);
    assert!(out.status.success(), "{out:?}");
    let text = stdout_of(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 1 + 4, "one row per default variant");
    for row in &lines[1..] {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols.len(), CSV_HEADER.split(',').count());
        assert_eq!(cols[1], "1024");
        assert_eq!(cols[2], "2048");
        assert_eq!(cols[6], "2", "workers column");
        assert!(cols[15].parse::<f64>().unwrap() > 0.0, "throughput");
    }
}

#[test]
fn bench_rows_sweep_a_size_range() {
    let mut args = QUICK_BENCH.to_vec();
    args[2] = "8-10";
    let extra = ["--variant", "naive"];
    args.extend(extra);
    let out = run(&args);
    assert!(out.status.success(), "{out:?}");
    let text = stdout_of(&out);
    let ns: Vec<&str> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap())
        .collect();
    assert_eq!(ns, ["256", "512", "1024"]);
}

#[test]
fn bench_json_lines_parse() {
    let mut args = QUICK_BENCH.to_vec();
    args.extend(["--format", "json"]);
    let out = run(&args);
    assert!(out.status.success(), "{out:?}");
    let text = stdout_of(&out);
    let mut count = 0;
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).expect("json line");
        assert!(v["variant"].is_string());
        assert!(v["throughput"].is_number());
        count += 1;
    }
    assert_eq!(count, 4);
}

#[test]
fn bench_non_time_columns_are_deterministic() {
    let strip_times = |text: &str| -> Vec<Vec<String>> {
        text.lines()
            .skip(1)
            .map(|l| {
                l.split(',')
                    .enumerate()
                    // build_ns, lookup_ns, throughput are wall-clock.
                    .filter(|(i, _)| ![13, 14, 15].contains(i))
                    .map(|(_, c)| c.to_string())
                    .collect()
            })
            .collect()
    };
    let a = run(QUICK_BENCH);
    let b = run(QUICK_BENCH);
    assert_eq!(strip_times(&stdout_of(&a)), strip_times(&stdout_of(&b)));
}

#[test]
fn bench_writes_out_file() {
    let dir = std::env::temp_dir().join("searchlab-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bench.csv");
    let _ = std::fs::remove_file(&path);
    let mut args = QUICK_BENCH.to_vec();
    let path_s = path.to_str().unwrap();
    args.extend(["--out", path_s]);
    let out = run(&args);
    assert!(out.status.success(), "{out:?}");
    assert!(stdout_of(&out).is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with(CSV_HEADER));
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn threads_env_sets_default_workers() {
    let mut cmd = searchlab(&[
        "bench",
        "--variant",
        "naive",
        "--n-log2",
        "8",
        "--lookups-log2",
        "8",
        "--reps",
        "3",
    ]);
    cmd.env("SEARCHLAB_THREADS", "3");
    let out = cmd.output().unwrap();
    assert!(out.status.success(), "{out:?}");
    let text = stdout_of(&out);
    let workers = text.lines().nth(1).unwrap().split(',').nth(6).unwrap();
    assert_eq!(workers, "3");
}

#[test]
fn explicit_workers_flag_beats_env() {
    let mut cmd = searchlab(&[
        "bench",
        "--variant",
        "naive",
        "--n-log2",
        "8",
        "--lookups-log2",
        "8",
        "--reps",
        "3",
        "--workers",
        "2",
    ]);
    cmd.env("SEARCHLAB_THREADS", "5");
    let out = cmd.output().unwrap();
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert_eq!(text.lines().nth(1).unwrap().split(',').nth(6), Some("2"));
}

#[test]
fn config_errors_exit_2() {
    let cases: &[&[&str]] = &[
        &[
            "bench",
            "--n-log2",
            "10",
            "--reps",
            "3",
            "--hit-ratio",
            "1.5",
        ],
        &["bench", "--n-log2", "10", "--reps", "2"],
        &[
            "bench",
            "--n-log2",
            "10",
            "--reps",
            "3",
            "--sort-batch",
            "12",
            "--stage",
            "8",
        ],
        &["bench", "--n-log2", "10", "--reps", "3", "--workers", "0"],
        &["bench", "--n-log2", "oops", "--reps", "3"],
        &["bench", "--variant", "binary"],
        &["trace", "--n-log2", "4-6"],
        &["definitely-not-a-subcommand"],
    ];
    for args in cases {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "args={args:?} out={out:?}");
    }
}

#[test]
fn bad_threads_env_exits_2() {
    let mut cmd = searchlab(&[
        "bench",
        "--variant",
        "naive",
        "--n-log2",
        "8",
        "--reps",
        "3",
    ]);
    cmd.env("SEARCHLAB_THREADS", "many");
    let out = cmd.output().unwrap();
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}

#[test]
fn verify_quick_run_passes() {
    let out = run(&["verify", "--reps", "2", "--n-log2", "6", "--seed", "11"]);
    assert!(out.status.success(), "{out:?}");
    let text = stdout_of(&out);
    assert!(text.contains("arrays"), "{text}");
    assert!(text.trim_end().ends_with("ok"), "{text}");
}

#[test]
fn verify_accepts_exponent_range() {
    let out = run(&["verify", "--reps", "1", "--n-log2", "4-6", "--seed", "2"]);
    assert!(out.status.success(), "{out:?}");
}

#[test]
fn trace_dump_shape_and_determinism() {
    let args = [
        "trace",
        "--variant",
        "full-pinned",
        "--n-log2",
        "10",
        "--lookups-log2",
        "4",
        "--seed",
        "5",
        "--pin-budget-slots",
        "48",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success(), "{a:?}");
    assert_eq!(a.stdout, b.stdout);

    let text = stdout_of(&a);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(TRACE_HEADER));
    let mut seen_pinned = false;
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 4, "{line}");
        assert!(cols[0].parse::<usize>().unwrap() < 16);
        cols[1].parse::<usize>().unwrap();
        assert!(
            ["main", "pinned", "partial"].contains(&cols[2]) || cols[2].starts_with("level-"),
            "{line}"
        );
        seen_pinned |= cols[2] == "pinned";
        assert!(cols[3].parse::<usize>().unwrap() < 1024);
    }
    assert!(seen_pinned);
    let summary = String::from_utf8(a.stderr).unwrap();
    assert!(summary.contains("mean shared prefix"), "{summary}");
}

#[test]
fn gen_csv_is_deterministic_with_checksum() {
    let args = [
        "gen",
        "--n-log2",
        "6",
        "--lookups-log2",
        "5",
        "--seed",
        "9",
        "--hit-ratio",
        "0.5",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success(), "{a:?}");
    assert_eq!(a.stdout, b.stdout);
    let err = String::from_utf8(a.stderr.clone()).unwrap();
    assert!(err.contains("workload checksum: 0x"), "{err}");

    let text = stdout_of(&a);
    assert!(text.starts_with("kind,value\n"));
    assert_eq!(text.lines().filter(|l| l.starts_with("build,")).count(), 64);
    assert_eq!(
        text.lines().filter(|l| l.starts_with("lookup,")).count(),
        32
    );
}

#[test]
fn gen_json_to_file() {
    let dir = std::env::temp_dir().join("searchlab-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("workload.json");
    let _ = std::fs::remove_file(&path);
    let out = run(&[
        "gen",
        "--n-log2",
        "5",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["n"], 32);
    assert_eq!(doc["lookups"], 64);
    assert_eq!(doc["build_keys"].as_array().unwrap().len(), 32);
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn sorted_order_workload_round_trips_through_gen() {
    let out = run(&[
        "gen",
        "--n-log2",
        "5",
        "--lookups-log2",
        "6",
        "--order",
        "sorted",
    ]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    let lookups: Vec<u64> = text
        .lines()
        .filter_map(|l| l.strip_prefix("lookup,"))
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(lookups.len(), 64);
    assert!(lookups.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn help_mentions_every_subcommand() {
    let out = run(&["--help"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    for sub in ["bench", "verify", "trace", "gen"] {
        assert!(text.contains(sub), "missing {sub} in help");
    }
}
