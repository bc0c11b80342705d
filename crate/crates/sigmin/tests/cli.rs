use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sigmin::record::{read_records, ExperimentRecord};

const MINIMAL: &str = "\
[experiment minimal]
kind = sv_tail
ensemble = gaussian
N = 20
n = 20
thresholds = 0.1
trials = 100
seed = 1
";

const CURVE: &str = "\
[experiment curve]
kind = distance_tail
ensemble = gaussian
n = 8
thresholds = 0.05, 0.2, 0.5, 1.0, 2.0
trials = 2000
seed = 3

[experiment alpha]
kind = smallball
ensemble = laplace
n = 4
thresholds = 0.3, 0.6
trials = 500
seed = 4
";

fn sigmin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sigmin")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn records(p: &Path) -> Vec<ExperimentRecord> {
    read_records(fs::read_to_string(p).unwrap().as_bytes()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn run_writes_one_record_and_reproduces() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "min.cfg", MINIMAL);
    let (a, b) = (dir.path().join("a.jsonl"), dir.path().join("b.jsonl"));
    for (out, threads) in [(&a, "1"), (&b, "3")] {
        let o = sigmin(&["run", "--config", s(&cfg), "--out", s(out), "--threads", threads]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let (ra, rb) = (records(&a), records(&b));
    assert_eq!(ra.len(), 1);
    let e = &ra[0].estimates[0];
    assert_eq!((e.trials + e.discarded, e.threshold, e.master_seed), (100, 0.1, 1));
    assert!(e.ci_low <= e.p_hat && e.p_hat <= e.ci_high);
    assert_eq!(ra[0].estimates, rb[0].estimates);
    assert_eq!(ra[0].config, rb[0].config);

    // The echoed config alone reproduces the counts.
    let echo = write(dir.path(), "echo.cfg", &ra[0].config);
    let c = dir.path().join("c.jsonl");
    assert!(sigmin(&["run", "--config", s(&echo), "--out", s(&c)]).status.success());
    assert_eq!(records(&c)[0].estimates, ra[0].estimates);
}

#[test]
fn run_appends_and_respects_seed_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "min.cfg", MINIMAL);
    let out = dir.path().join("r.jsonl");
    for seed in ["1", "77"] {
        assert!(sigmin(&["run", "--config", s(&cfg), "--out", s(&out), "--seed", seed]).status.success());
    }
    let recs = records(&out);
    assert_eq!(recs.len(), 2);
    assert_eq!((recs[0].estimates[0].master_seed, recs[1].estimates[0].master_seed), (1, 77));
    assert!(recs[1].config.contains("seed = 77"));
}

#[test]
fn run_csv_has_a_single_header() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "curve.cfg", CURVE);
    let out = dir.path().join("r.csv");
    for _ in 0..2 {
        let o = sigmin(&["run", "--config", s(&cfg), "--out", s(&out), "--format", "csv"]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "experiment,N,n,threshold,normalization,p_hat,ci_low,ci_high,trials,discards");
    assert_eq!(lines.iter().filter(|l| l.starts_with("experiment,")).count(), 1);
    assert_eq!(lines.len(), 1 + 2 * (5 + 2));
}

#[test]
fn failures_have_distinct_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let zero = write(dir.path(), "zero.cfg", &MINIMAL.replace("trials = 100", "trials = 0"));
    let unknown = write(dir.path(), "kind.cfg", &MINIMAL.replace("sv_tail", "sv_tale"));
    let good = write(dir.path(), "min.cfg", MINIMAL);
    let unwritable = dir.path().join("missing-dir").join("out.jsonl");

    let o = sigmin(&["run", "--config", s(&zero)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("trials must be positive"), "{}", stderr(&o));

    let o = sigmin(&["run", "--config", s(&unknown)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2") && stderr(&o).contains("sv_tale"), "{}", stderr(&o));

    let o = sigmin(&["run", "--config", s(&good), "--out", s(&unwritable)]);
    assert_eq!(o.status.code(), Some(4));

    let o = sigmin(&["run", "--config", s(&dir.path().join("absent.cfg"))]);
    assert_eq!(o.status.code(), Some(2));

    let o = sigmin(&["run", "--config", s(&good), "--format", "xml"]);
    assert!(!o.status.success());
}

#[test]
fn summarize_sorts_and_handles_empty_input() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "curve.cfg", CURVE);
    let recs = dir.path().join("r.jsonl");
    assert!(sigmin(&["run", "--config", s(&cfg), "--out", s(&recs)]).status.success());

    let o = sigmin(&["summarize", s(&recs)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 7);
    assert!(rows[..2].iter().all(|r| r[0] == "alpha"));
    assert!(rows[2..].iter().all(|r| r[0] == "curve"));
    let t: Vec<f64> = rows[2..].iter().map(|r| r[3].parse().unwrap()).collect();
    assert!(t.windows(2).all(|w| w[0] < w[1]));

    let empty = write(dir.path(), "empty.jsonl", "");
    let out = dir.path().join("summary.csv");
    assert!(sigmin(&["summarize", s(&empty), "--out", s(&out)]).status.success());
    assert_eq!(fs::read_to_string(&out).unwrap().lines().count(), 1);
}

#[test]
fn tail_curve_is_ordered_and_monotone() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "curve.cfg", CURVE);
    let recs = dir.path().join("r.jsonl");
    assert!(sigmin(&["run", "--config", s(&cfg), "--out", s(&recs)]).status.success());

    let out = dir.path().join("curve.csv");
    let o = sigmin(&["tail-curve", s(&recs), "--experiment", "curve", "--out", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("threshold,p_hat,ci_low,ci_high"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 5);
    assert!(rows.windows(2).all(|w| w[0][0] < w[1][0] && w[0][1] <= w[1][1]));
    assert!(rows.iter().all(|r| r[2] <= r[1] && r[1] <= r[3]));

    let o = sigmin(&["tail-curve", s(&recs), "--experiment", "nope"]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    assert!(stderr(&o).contains("nope"), "{}", stderr(&o));
}

#[test]
fn malformed_records_report_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "min.cfg", MINIMAL);
    let recs = dir.path().join("r.jsonl");
    assert!(sigmin(&["run", "--config", s(&cfg), "--out", s(&recs)]).status.success());
    let mut text = fs::read_to_string(&recs).unwrap();
    text.push_str("{not json\n");
    fs::write(&recs, text).unwrap();
    for cmd in [vec!["summarize", s(&recs)], vec!["tail-curve", s(&recs), "--experiment", "minimal"]] {
        let o = sigmin(&cmd);
        assert_eq!(o.status.code(), Some(5));
        assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
    }
}

#[test]
fn self_test_runs_a_selected_criterion() {
    let o = sigmin(&["self-test", "--only", "5", "--threads", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().next().unwrap().starts_with("[PASS] 05 "), "{text}");
    assert!(text.contains("1 of 1 criteria passed"));
}
