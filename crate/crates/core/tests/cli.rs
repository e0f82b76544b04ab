//! End-to-end runs of the `posted-price` binary: exit codes, output formats,
//! config precedence and reproducibility.

use std::io::Write as _;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_posted-price"));
    c.env_remove("POSTED_PRICE_THREADS");
    c
}

fn instance(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data/instances")
        .join(name)
}

fn run(c: &mut Command) -> Output {
    c.output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("bad JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn simulate(threads: &str) -> Output {
    run(bin()
        .env("POSTED_PRICE_THREADS", threads)
        .args([
            "--format",
            "json",
            "simulate",
            "--mechanism",
            "esp",
            "--trials",
            "30000",
            "--seed",
            "17",
            "--instance",
        ])
        .arg(instance("uniform_pair.json")))
}

#[test]
fn simulate_output_is_byte_identical_across_runs_and_thread_counts() {
    let a = simulate("1");
    let b = simulate("1");
    let c = simulate("4");
    assert_eq!(
        a.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&a.stderr)
    );
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let v = json(&a);
    assert_eq!(v["command"], "simulate");
    assert_eq!(v["config_hash"].as_str().unwrap().len(), 64);
    assert_eq!(v["result"]["trials"], 30000);
}

#[test]
fn certify_bundled_instance_passes() {
    let out = run(bin()
        .args(["--format", "json", "certify", "--seed", "1", "--instance"])
        .arg(instance("uniform_pair.json")));
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json(&out);
    assert_eq!(v["pass"], true);
}

#[test]
fn certify_random_suite_in_csv() {
    let out = run(bin().args([
        "--format",
        "csv",
        "certify",
        "--random",
        "8",
        "--n-max",
        "2",
        "--support",
        "2",
        "--seed",
        "3",
    ]));
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    // Header plus one line per instance.
    assert!(text.lines().count() >= 9, "{text}");
}

#[test]
fn usage_and_input_errors_exit_with_two() {
    let missing_seed = run(bin()
        .args(["simulate", "--instance"])
        .arg(instance("uniform_pair.json")));
    assert_eq!(missing_seed.status.code(), Some(2));
    let unknown = run(bin().args(["tables", "--bogus"]));
    assert_eq!(unknown.status.code(), Some(2));
    let no_file = run(bin().args([
        "certify",
        "--seed",
        "1",
        "--instance",
        "/nonexistent/instance.json",
    ]));
    assert_eq!(no_file.status.code(), Some(2));
    let wrong_mechanism = run(bin()
        .args([
            "simulate",
            "--mechanism",
            "pa-spm",
            "--seed",
            "1",
            "--instance",
        ])
        .arg(instance("uniform_pair.json")));
    assert_eq!(wrong_mechanism.status.code(), Some(2));
}

#[test]
fn failing_check_exits_with_one() {
    let out = run(bin().args(["checks", "--n-max", "5", "--trials", "50", "--flip-r"]));
    assert_eq!(out.status.code(), Some(1));
    let ok = run(bin().args(["checks", "--n-max", "5", "--trials", "50"]));
    assert_eq!(
        ok.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&ok.stderr)
    );
}

#[test]
fn config_file_is_read_and_flags_override_it() {
    let mut cfg = tempfile::NamedTempFile::new().unwrap();
    writeln!(cfg, "seed = 5\ntrials = 2000\nformat = \"json\"").unwrap();
    let from_file = run(bin()
        .arg("--config")
        .arg(cfg.path())
        .args(["simulate", "--instance"])
        .arg(instance("uniform_pair.json")));
    assert_eq!(
        from_file.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&from_file.stderr)
    );
    let v = json(&from_file);
    assert_eq!(v["result"]["trials"], 2000);
    assert_eq!(v["result"]["seed"], 5);

    let overridden = run(bin()
        .arg("--config")
        .arg(cfg.path())
        .args(["simulate", "--trials", "100", "--seed", "6", "--instance"])
        .arg(instance("uniform_pair.json")));
    let v = json(&overridden);
    assert_eq!(v["result"]["trials"], 100);
    assert_eq!(v["result"]["seed"], 6);
}

#[test]
fn malformed_config_is_an_input_error() {
    let mut cfg = tempfile::NamedTempFile::new().unwrap();
    writeln!(cfg, "seed = 5\nunknown_key = 1").unwrap();
    let out = run(bin()
        .arg("--config")
        .arg(cfg.path())
        .args(["checks", "--n-max", "2", "--trials", "10"]));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn lp_solve_reports_the_continuous_program() {
    let out = run(bin().args([
        "--format",
        "json",
        "lp-solve",
        "--program",
        "spm-h",
        "--H",
        "2",
    ]));
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("0.7425"), "{text}");
}

#[test]
fn lp_solve_accepts_an_lp_file() {
    let mut lp = tempfile::NamedTempFile::new().unwrap();
    write!(
        lp,
        r#"{{"c": [1.0, 1.0], "a": [[1.0, 2.0], [3.0, 1.0]], "b": [4.0, 6.0]}}"#
    )
    .unwrap();
    let out = run(bin()
        .args(["--format", "json", "lp-solve", "--file"])
        .arg(lp.path()));
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("2.8"), "{text}");
}

#[test]
fn tables_write_to_an_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spm.csv");
    let out = run(bin()
        .args(["--format", "csv", "-o"])
        .arg(&path)
        .args(["tables", "--which", "spm-n", "--n", "1..3", "--k", "50"]));
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(path).unwrap();
    assert!(
        text.starts_with("setting") || text.contains("spm-n"),
        "{text}"
    );
}
