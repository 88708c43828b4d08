use std::path::Path;
use std::process::{Command, Output};

use qst_cli::output::{parse_sweep_csv, SWEEP_HEADER};
use qst_cli::RunConfig;

fn qst(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qst"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn default_sweep_has_240_rows_in_range() {
    let out = qst(&[]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert!(!text.contains('\r'));
    let result = parse_sweep_csv(&text).unwrap();
    assert_eq!(result.rows.len(), 240);
    for row in &result.rows {
        assert!((-1e-9..=1.0 + 1e-9).contains(&row.fidelity), "{row:?}");
    }
    // N outer, ratio ascending, dfs before ndfs
    let keys: Vec<(usize, f64, &str)> = result
        .rows
        .iter()
        .map(|r| (r.channel_length, r.ratio, r.encoding.tag()))
        .collect();
    let mut sorted = keys.clone();
    sorted.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.cmp(b.2)));
    assert_eq!(keys, sorted);
}

#[test]
fn csv_round_trips_in_memory_result() {
    let args = ["sweep", "--channel-lengths", "5,9", "--ratio-steps", "7"];
    let text = stdout(&qst(&args));
    let cfg = RunConfig::parse_from(std::iter::once("qst").chain(args)).unwrap();
    let in_memory = qst_cli::commands::run_sweep(&cfg).unwrap();
    assert_eq!(parse_sweep_csv(&text).unwrap(), in_memory);
    assert!(text.starts_with(SWEEP_HEADER));
}

#[test]
fn output_is_byte_identical_across_runs_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for (threads, format) in [("1", "csv"), ("4", "csv"), ("1", "json"), ("3", "json")] {
        let path = dir.path().join(format!("out-{threads}.{format}"));
        let status = Command::new(env!("CARGO_BIN_EXE_qst"))
            .env("QST_THREADS", threads)
            .args([
                "--channel-lengths",
                "7,11",
                "--ratio-steps",
                "9",
                "--format",
                format,
                "-o",
            ])
            .arg(&path)
            .status()
            .unwrap();
        assert!(status.success());
        outputs.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[2], outputs[3]);
    let json: serde_json::Value = serde_json::from_slice(&outputs[2]).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 2 * 9 * 2);
}

#[test]
fn oracle_is_deterministic_with_dephasing() {
    let args = [
        "oracle",
        "--ratio-steps",
        "2",
        "--sigma-lambda",
        "0.01",
        "--shots",
        "20",
        "--seed",
        "5",
    ];
    let a = qst(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, qst(&args).stdout);
    let text = stdout(&a);
    assert!(
        text.starts_with("N,n,ratio,time,encoding,sigma_lambda,fidelity_oracle,fidelity_formula\n")
    );
    assert_eq!(text.lines().count(), 1 + 2 * 2);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["sweep", "--channel-lengths", "100"][..],
        &["--format", "xml"],
        &["--unknown-flag"],
        &["phases", "--n", "4"],
    ] {
        let out = qst(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    let bad_threads = Command::new(env!("CARGO_BIN_EXE_qst"))
        .env("QST_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(bad_threads.status.code(), Some(2));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "channel_lengths = [5]\nratio_steps = 3\nencoding = \"dfs\"\n",
    )
    .unwrap();
    let cfg_arg = cfg.to_str().unwrap();
    let text = stdout(&qst(&["--config", cfg_arg]));
    assert_eq!(text.lines().count(), 1 + 3);
    let text = stdout(&qst(&["--config", cfg_arg, "--ratio-steps", "4"]));
    assert_eq!(text.lines().count(), 1 + 4);

    std::fs::write(&cfg, "nonsense = true\n").unwrap();
    assert_eq!(qst(&["--config", cfg_arg]).status.code(), Some(2));
}

#[test]
fn io_failure_exits_1_without_partial_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("out.csv");
    let out = qst(&[
        "--channel-lengths",
        "3",
        "--ratio-steps",
        "2",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!Path::new(&path).exists());
}

#[test]
fn phases_table_for_two_qubit_registers() {
    let out = qst(&["phases"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("pattern,predicted,measured,amplitude_error,match")
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 32);
    assert!(rows.iter().all(|r| r.ends_with(",true")));
    assert!(rows[0].starts_with("00|0|00,1,1,"));
}

#[test]
fn verify_passes_and_zero_tolerance_fails() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = qst(&["verify", "-o", path.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(report["overall_pass"], true);
    let checks = report["checks"].as_array().unwrap();
    assert_eq!(checks.len(), qst_core::verify::CHECK_NAMES.len());
    for (check, name) in checks.iter().zip(qst_core::verify::CHECK_NAMES) {
        assert_eq!(check["name"], name);
        assert!(check["max_error"].is_number());
    }

    let out = qst(&["verify", "--tolerance", "0"]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["overall_pass"], false);
}
