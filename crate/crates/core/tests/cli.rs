use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ffdirac(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ffdirac"))
        .args(args)
        .current_dir(cwd)
        .env("RUNNER_THREADS", "2")
        .output()
        .expect("binary runs")
}

const SMALL_FIG2: &str = "preset = \"fig2\"\ndt = 0.00390625\n[grid]\nn_points = 256\n";

#[test]
fn identical_configs_give_identical_outputs() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("run.toml"), SMALL_FIG2).unwrap();
    let mut snapshots = Vec::new();
    for _ in 0..2 {
        let out = ffdirac(&["run", "--config", "run.toml", "--out", "out"], dir.path());
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let files: Vec<Vec<u8>> = ["summary.json", "ratios.csv", "potentials.csv"]
            .iter()
            .map(|f| fs::read(dir.path().join("out").join(f)).unwrap())
            .collect();
        snapshots.push(files);
    }
    assert_eq!(snapshots[0], snapshots[1]);

    let summary: serde_json::Value = serde_json::from_slice(&snapshots[0][0]).unwrap();
    assert_eq!(summary["schema_version"], 1);
    assert_eq!(summary["passed"], true);
    assert!(summary["results"]["pair_production_ff"].is_null());
    let header = String::from_utf8(snapshots[0][1].clone()).unwrap();
    assert!(header.starts_with("x,re_unperturbed_1,im_unperturbed_1,re_unperturbed_2,"));
    assert_eq!(header.lines().count(), 257);
    let timing: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("out/timing.json")).unwrap()).unwrap();
    assert!(timing["total_seconds"].as_f64().unwrap() > 0.0);
}

#[test]
fn failed_checks_set_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    // The protocol does not switch off smoothly, so the shortcut check fails.
    let text = format!("{SMALL_FIG2}[protocol]\ntype = \"linear_ramp\"\ntau = 1.0\nfrom = 1.0\nto = 2.0\n");
    fs::write(dir.path().join("run.toml"), text).unwrap();
    let out = ffdirac(&["run", "--config", "run.toml", "--out", "o"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let summary: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("o/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["passed"], false);
    assert_eq!(summary["results"]["shortcut_conditions"]["flat_end"], false);
}

#[test]
fn config_errors_are_machine_readable() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("bad.toml"),
        "preset = \"fig1\"\ndt = 0.3\n[params]\nmass = 2.0\n",
    )
    .unwrap();
    let out = ffdirac(&["validate", "--config", "bad.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "config");
    let fields: Vec<&str> = err["error"]["issues"]
        .as_array()
        .unwrap()
        .iter()
        .map(|i| i["field"].as_str().unwrap())
        .collect();
    assert!(fields.contains(&"dt") && fields.contains(&"params.mass"), "{fields:?}");
}

#[test]
fn validate_prints_resolved_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = ffdirac(&["validate", "--preset", "fig1", "--grid-n", "256"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let cfg: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(cfg["grid"]["n_points"], 256);
    assert_eq!(cfg["backend"], "spectral_split_step");
}

#[test]
fn bad_thread_count_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_ffdirac"))
        .args(["validate", "--preset", "fig1"])
        .current_dir(dir.path())
        .env("RUNNER_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
