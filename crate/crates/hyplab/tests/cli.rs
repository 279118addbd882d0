//! End-to-end runs of the compiled `hyplab` binary: exit codes, output
//! shapes, config resolution, and byte-level reproducibility.

use std::path::Path;
use std::process::{Command, Output};

fn hyplab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyplab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn data_file(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
        .display()
        .to_string()
}

/// Drops the volatile timestamp line so runs can be compared byte-for-byte.
fn stable_lines(csv: &str) -> Vec<String> {
    csv.lines()
        .filter(|l| !l.starts_with("# timestamp="))
        .map(str::to_owned)
        .collect()
}

#[test]
fn help_and_version_exit_zero() {
    let help = hyplab(&["--help"]);
    assert_eq!(code(&help), 0);
    assert!(stdout(&help).contains("error-scan"));
    let version = hyplab(&["--version"]);
    assert_eq!(code(&version), 0);
    assert!(stdout(&version).starts_with("hyplab"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&hyplab(&["count"])), 1);
    assert_eq!(code(&hyplab(&["--no-such-flag"])), 1);
    assert_eq!(code(&hyplab(&["not-a-command"])), 1);
}

#[test]
fn domain_and_data_errors_exit_two() {
    let bad_d = hyplab(&["heegner", "-D", "-5"]);
    assert_eq!(code(&bad_d), 2);
    assert!(stderr(&bad_d).contains("fundamental"));

    let missing = hyplab(&["spec-sum", "/nonexistent/evs.txt", "20", "100"]);
    assert_eq!(code(&missing), 2);
}

#[test]
fn numeric_failures_exit_three() {
    let out = hyplab(&["eisenstein", "0.5+0.01i", "30", "--trunc", "1"]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("truncation"));
}

#[test]
fn count_emits_known_values() {
    let out = hyplab(&["count", "i", "i", "4"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let last = text.lines().last().unwrap();
    assert!(last.starts_with("i,i,"), "{last}");
    assert!(last.contains(",10,"), "{last}");

    let brute = hyplab(&["count", "i", "i", "4", "--brute"]);
    let blast = stdout(&brute);
    let blast = blast.lines().last().unwrap();
    assert!(blast.contains(",10,"), "{blast}");
}

#[test]
fn heegner_table_and_json_schema() {
    let table = hyplab(&["heegner", "-D", "-23"]);
    assert_eq!(code(&table), 0);
    let text = stdout(&table);
    assert!(text.contains("# h=3"));
    assert_eq!(text.lines().filter(|l| l.starts_with("-23,")).count(), 3);

    let json = hyplab(&["heegner", "-D", "-23", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
    assert_eq!(v["D"], -23);
    assert_eq!(v["h"], 3);
    assert_eq!(v["forms"].as_array().unwrap().len(), 3);
    assert_eq!(v["forms"][0], serde_json::json!([1, 1, 6]));
    let p0 = v["points"][0].as_array().unwrap();
    assert!(p0[1].as_f64().unwrap() > 0.8);
}

#[test]
fn json_format_round_trips() {
    let out = hyplab(&["--format", "json", "count", "i", "i", "4"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["rows"][0]["count"], 10);
    assert_eq!(v["rows"][0]["error"], -2.0);
    assert_eq!(v["meta"]["kind"], "count");
}

#[test]
fn out_flag_writes_the_file_instead_of_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let out = hyplab(&["--out", path.to_str().unwrap(), "count", "i", "i", "2"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    assert!(written.contains("z,w,x,count"));
    assert!(written.lines().last().unwrap().contains(",2,"));
}

#[test]
fn dry_run_prints_resolved_config_without_running() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("never.csv");
    let out = hyplab(&[
        "--dry-run",
        "--seed",
        "7",
        "--out",
        path.to_str().unwrap(),
        "error-scan",
        "--d-list",
        "-4,-8",
        "--x-grid",
        "10,100",
    ]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["kind"], "error-scan");
    assert_eq!(v["d_list"], serde_json::json!([-4, -8]));
    assert_eq!(v["seed"], 7);
    assert!(!path.exists(), "dry run must not write the output file");
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scan.json");
    std::fs::write(
        &cfg,
        r#"{"kind":"error-scan","d_list":[-3],"x_grid":[10.0],"seed":11}"#,
    )
    .unwrap();

    let from_file = hyplab(&["--config", cfg.to_str().unwrap(), "error-scan"]);
    assert_eq!(code(&from_file), 0);
    assert!(stdout(&from_file).contains("\n-3,"));

    let overridden = hyplab(&[
        "--config",
        cfg.to_str().unwrap(),
        "error-scan",
        "--d-list",
        "-4",
    ]);
    let text = stdout(&overridden);
    assert!(text.contains("\n-4,"), "{text}");
    assert!(!text.contains("\n-3,"), "{text}");
    assert!(text.contains("# seed=11"), "file seed survives");
}

#[test]
fn reruns_reproduce_identical_tables() {
    let args = [
        "error-scan",
        "--d-list",
        "-4,-7,-23",
        "--x-grid",
        "2,10,50",
    ];
    let a = hyplab(&args);
    let b = hyplab(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(stable_lines(&stdout(&a)), stable_lines(&stdout(&b)));

    // Same rows under a different thread budget; only the meta echo differs.
    let mut threaded = vec!["--threads", "3"];
    threaded.extend_from_slice(&args);
    let c = hyplab(&threaded);
    let strip_threads = |ls: Vec<String>| {
        ls.into_iter()
            .filter(|l| !l.starts_with("# threads="))
            .collect::<Vec<_>>()
    };
    assert_eq!(
        strip_threads(stable_lines(&stdout(&a))),
        strip_threads(stable_lines(&stdout(&c)))
    );
}

#[test]
fn spectral_commands_read_demo_data() {
    let file = data_file("eigenvalues_demo.txt");
    let sum = hyplab(&["spec-sum", &file, "20", "100"]);
    assert_eq!(code(&sum), 0);
    let text = stdout(&sum);
    let last = text.lines().last().unwrap();
    let fields: Vec<&str> = last.split(',').collect();
    assert_eq!(fields[2], "10", "all demo eigenvalues lie below 20");
    let s_abs: f64 = fields[5].parse().unwrap();
    assert!(s_abs <= 10.0 + 1e-9);

    let scan = hyplab(&[
        "spec-scan",
        &file,
        "--t-grid",
        "10,15,20",
        "--x-grid",
        "2,10,100",
    ]);
    assert_eq!(code(&scan), 0);
    let text = stdout(&scan);
    let counts: Vec<i64> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("t,"))
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(counts.len(), 9);
    // Rows are in (t, x) order; the count depends on t alone and grows with it.
    let by_t: Vec<i64> = counts.iter().step_by(3).copied().collect();
    assert!(by_t.windows(2).all(|w| w[0] <= w[1]), "{by_t:?}");
    assert_eq!(by_t[2], 10);
}

#[test]
fn maass_eval_reads_demo_data() {
    let file = data_file("maass_demo.json");
    let out = hyplab(&["--format", "json", "maass-eval", &file, "0", "0.2+1.1i"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["rows"][0]["parity"], "odd");
    assert!(v["rows"][0]["value"].as_f64().unwrap().is_finite());

    let bad = hyplab(&["maass-eval", &file, "9", "i"]);
    assert_eq!(code(&bad), 2);
}

#[test]
fn large_tables_emit_quickly() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("big.csv");
    let t_grid: Vec<String> = (1..=100).map(|i| format!("{}", i as f64 * 0.3)).collect();
    let x_grid: Vec<String> = (1..=100).map(|i| format!("{}", 2.0 + i as f64)).collect();
    let file = data_file("eigenvalues_demo.txt");
    let start = std::time::Instant::now();
    let out = hyplab(&[
        "--out",
        path.to_str().unwrap(),
        "spec-scan",
        &file,
        "--t-grid",
        &t_grid.join(","),
        "--x-grid",
        &x_grid.join(","),
    ]);
    let elapsed = start.elapsed();
    assert_eq!(code(&out), 0);
    let written = std::fs::read_to_string(&path).unwrap();
    let rows = written.lines().filter(|l| !l.starts_with('#')).count() - 1;
    assert_eq!(rows, 10_000);
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
}

#[test]
fn scan_validation_errors_exit_two() {
    let no_grid = hyplab(&["error-scan", "--d-list", "-4"]);
    assert_eq!(code(&no_grid), 2);

    let bad_x = hyplab(&["error-scan", "--d-list", "-4", "--x-grid", "1.5"]);
    assert_eq!(code(&bad_x), 2);

    let bad_t = hyplab(&["supnorm-scan", "--t-grid", "40"]);
    assert_eq!(code(&bad_t), 2);
}
