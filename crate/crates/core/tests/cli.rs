use std::path::Path;
use std::process::{Command, Output};

use puretomo::harness::read_csv;

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_puretomo"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn simulate_then_reconstruct_ghz() {
    let dir = tempfile::tempdir().unwrap();
    let sim = run(
        &[
            "simulate", "--state", "ghz", "--n", "3", "--mode", "local", "--m", "2", "--shots",
            "8192", "--seed", "7", "--out", "c.json",
        ],
        dir.path(),
    );
    assert!(
        sim.status.success(),
        "{}",
        String::from_utf8_lossy(&sim.stderr)
    );
    let rec = run(
        &[
            "reconstruct",
            "--in",
            "c.json",
            "--target",
            "ghz",
            "--out",
            "est.json",
        ],
        dir.path(),
    );
    assert_eq!(rec.status.code(), Some(0));
    let text = stdout(&rec);
    let fid: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("fidelity "))
        .expect("fidelity line")
        .parse()
        .unwrap();
    assert!((0.9..=1.0).contains(&fid), "fidelity {fid}");

    let est: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("est.json")).unwrap())
            .unwrap();
    assert_eq!(est["n"], 3);
    assert_eq!(est["amps"].as_array().unwrap().len(), 8);
    assert!(est["diagnostics"]["cond"].is_object());
    assert!(est["diagnostics"]["fallbacks"].is_u64());
    assert!(est["diagnostics"]["null_branches"].is_u64());

    // The estimate file is itself a valid state.
    let state: puretomo::state::PureState =
        serde_json::from_value(serde_json::json!({"n": est["n"], "amps": est["amps"]})).unwrap();
    assert_eq!(state.n(), 3);
}

#[test]
fn reconstruct_without_out_prints_json() {
    let dir = tempfile::tempdir().unwrap();
    run(
        &[
            "simulate",
            "--state",
            "phi1",
            "--n",
            "2",
            "--mode",
            "entangled",
            "--m",
            "3",
            "--out",
            "c.json",
        ],
        dir.path(),
    );
    let rec = run(
        &["reconstruct", "--in", "c.json", "--target", "phi1"],
        dir.path(),
    );
    assert!(rec.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&rec)).unwrap();
    assert!(v["fidelity"].as_f64().unwrap() > 0.9);
}

#[test]
fn bench_writes_csv_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "bench", "--n", "2", "--trials", "5", "--shots", "8192", "--m", "2", "--mode", "local",
            "--json", "s.json",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let rows = read_csv(out.stdout.as_slice()).unwrap();
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r.n == 2 && r.fidelity >= 0.9));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("s.json")).unwrap()).unwrap();
    assert_eq!(
        summary["per_n"][0]["fidelities"].as_array().unwrap().len(),
        5
    );
}

#[test]
fn bench_reads_toml_config() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("bench.toml"),
        "n_range = [2, 3]\nm = 3\nmode = \"entangled\"\nshots = 2048\ntrials = 4\nstates = \"separable\"\nseed = 11\n",
    )
    .unwrap();
    let out = run(
        &["bench", "--config", "bench.toml", "--csv", "r.csv"],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rows = read_csv(std::fs::File::open(dir.path().join("r.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 8);
    std::fs::write(dir.path().join("bad.toml"), "n_range = []\n").unwrap();
    assert_eq!(
        run(&["bench", "--config", "bad.toml"], dir.path())
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn bases_lists_circuits() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &["bases", "--n", "2", "--m", "2", "--mode", "local"],
        dir.path(),
    );
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.matches("# basis").count(), 5);
    assert!(text.contains("# basis local(a=2, b=2) n=2"));
    let out = run(
        &["bases", "--n", "2", "--m", "2", "--mode", "local", "--qasm"],
        dir.path(),
    );
    assert_eq!(stdout(&out).matches("OPENQASM 2.0;").count(), 5);
    let out = run(
        &[
            "bases",
            "--n",
            "3",
            "--m",
            "2",
            "--mode",
            "entangled",
            "--qasm",
        ],
        dir.path(),
    );
    assert!(stdout(&out).contains("no OpenQASM 2.0 form"));
}

#[test]
fn bootstrap_reports_band() {
    let dir = tempfile::tempdir().unwrap();
    run(
        &[
            "simulate", "--state", "phi4", "--n", "2", "--shots", "2048", "--out", "c.json",
        ],
        dir.path(),
    );
    let out = run(
        &[
            "bootstrap",
            "--in",
            "c.json",
            "--target",
            "phi4",
            "--resamples",
            "100",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let (lo, p, hi) = (
        v["lo"].as_f64().unwrap(),
        v["point"].as_f64().unwrap(),
        v["hi"].as_f64().unwrap(),
    );
    assert!(lo <= p && p <= hi);
    let out = run(
        &[
            "bootstrap",
            "--in",
            "c.json",
            "--target",
            "phi4",
            "--resamples",
            "10",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        run(&["reconstruct", "--in", "missing.json"], dir.path())
            .status
            .code(),
        Some(2)
    );
    let bad = run(&["transmogrify"], dir.path());
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("Usage"));
    assert_eq!(
        run(&["simulate", "--bogus"], dir.path()).status.code(),
        Some(1)
    );
    std::fs::write(dir.path().join("junk.json"), "{").unwrap();
    assert_eq!(
        run(&["reconstruct", "--in", "junk.json"], dir.path())
            .status
            .code(),
        Some(2)
    );
}
