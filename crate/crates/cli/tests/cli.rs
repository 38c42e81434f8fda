use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const ROVER_INIT: &str = include_str!("../../core/tests/fixtures/rover/init.pddl");
const ROVER_DRIFT: &str = include_str!("../../core/tests/fixtures/rover/drift.pddl");

fn drift(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_drift"))
        .args(args)
        .current_dir(cwd)
        .env_remove("DRIFT_CORPUS_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn error_record(o: &Output) -> serde_json::Value {
    let err = String::from_utf8_lossy(&o.stderr);
    let line = err.lines().last().expect("an error line");
    serde_json::from_str(line).expect("error record is JSON")
}

#[test]
fn self_assessment_asks_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let o = drift(&["assess", "--domain", "gripper", "--out-dir", "out"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.contains("query_count = 0"));
    assert!(out.contains("accuracy = 1.000000"));
    let report = fs::read_to_string(dir.path().join("out/report.txt")).unwrap();
    assert!(report.contains("query_count = 0"));
    assert!(dir.path().join("out/learned.pddl").exists());
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &'static str| {
        vec!["assess", "--domain", "gripper", "--drift-amount", "0.5", "--drift-method", "drop", "--seed", "11", "--out-dir", out]
    };
    for out in ["a", "b"] {
        let o = drift(&args(out), dir.path());
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["report.txt", "learned.pddl", "init.pddl", "trace.txt"] {
        let a = fs::read(dir.path().join("a").join(f)).unwrap();
        let b = fs::read(dir.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
    let report = fs::read_to_string(dir.path().join("a/report.txt")).unwrap();
    assert!(report.contains("(query-log"));
}

#[test]
fn missing_domain_file_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = drift(&["assess", "--domain", "missing/domain.pddl", "--problem", "p.pddl"], dir.path());
    assert!(!o.status.success());
    assert_eq!(error_record(&o)["error"], "io");
}

#[test]
fn diff_lists_the_changed_pal_tuples() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("init.pddl"), ROVER_INIT).unwrap();
    fs::write(dir.path().join("drift.pddl"), ROVER_DRIFT).unwrap();
    let o = drift(&["diff", "init.pddl", "drift.pddl"], dir.path());
    assert!(o.status.success());
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 6);
    assert!(lines.contains(&"sample_rock (battery_half ?r) pre + 0"));
    assert_eq!(lines[5], "delta = 5");

    let o = drift(&["diff", "init.pddl", "init.pddl"], dir.path());
    assert_eq!(stdout(&o), "delta = 0\n");

    let gripper = include_str!("../../core/corpus/gripper/domain.pddl");
    fs::write(dir.path().join("gripper.pddl"), gripper).unwrap();
    let o = drift(&["diff", "init.pddl", "gripper.pddl"], dir.path());
    assert!(!o.status.success());
    assert_eq!(error_record(&o)["error"], "incomparable-models");
}

#[test]
fn drift_then_diff_counts_the_flips() {
    let dir = tempfile::tempdir().unwrap();
    let o = drift(&["drift", "--domain", "gripper", "--distinct", "--drift-amount", "0.5", "--seed", "2", "--out", "d.pddl"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    fs::write(dir.path().join("g.pddl"), include_str!("../../core/corpus/gripper/domain.pddl")).unwrap();
    let o = drift(&["diff", "--distinct", "d.pddl", "g.pddl"], dir.path());
    assert!(stdout(&o).ends_with("delta = 10\n"));
}

#[test]
fn bench_writes_results_summary_and_timings() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("bench.toml"),
        "domains = [{ name = \"gripper\" }]\nlevels = [0.3]\nmethods = [\"mixed\"]\ntrials = 2\nmaster_seed = 5\n",
    )
    .unwrap();
    let o = drift(&["bench", "--config", "bench.toml", "--out-dir", "out"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("rows = 4"));
    let csv = fs::read_to_string(dir.path().join("out/results.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/summary.json")).unwrap()).unwrap();
    assert!(summary.is_array() || summary.is_object());
    assert!(dir.path().join("out/timings.csv").exists());

    let o = drift(&["bench", "--config", "bench.toml", "--out-dir", "again"], dir.path());
    assert!(o.status.success());
    assert_eq!(csv, fs::read_to_string(dir.path().join("again/results.csv")).unwrap());
}

#[test]
fn bad_config_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.toml"), "levels = [1.5]\n").unwrap();
    let o = drift(&["bench", "--config", "bad.toml"], dir.path());
    assert!(!o.status.success());
    assert_eq!(error_record(&o)["error"], "config");
}

#[test]
fn trace_has_the_requested_length() {
    let dir = tempfile::tempdir().unwrap();
    let o = drift(&["trace", "--domain", "blocksworld", "--trace-length", "4"], dir.path());
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(out.matches("(state").count(), 5);
    assert_eq!(out.matches("(action").count(), 4);
}
