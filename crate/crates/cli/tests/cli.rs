//! End-to-end tests of the `invobs` binary.

use std::path::Path;
use std::process::{Command, Output};

use invobs_core::simulation::TrajectoryRecord;
use invobs_core::suite::CHECK_NAMES;

fn invobs(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_invobs"))
        .args(args)
        .current_dir(dir)
        .env_remove("INVOBS_THREADS")
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn simulate_writes_every_artifact() {
    let tmp = tempfile::tempdir().unwrap();
    let o = invobs(&["simulate", "--t-end", "2", "--out", "run"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = tmp.path().join("run");
    let manifest: serde_json::Value = serde_json::from_str(&read(&out, "manifest.json")).unwrap();
    for artifact in manifest["artifacts"].as_array().unwrap() {
        assert!(out.join(artifact.as_str().unwrap()).is_file(), "{artifact}");
    }
    assert_eq!(manifest["command"], "simulate");
    assert_eq!(manifest["passed"], true);

    let record = TrajectoryRecord::from_csv(&read(&out, "trajectory.csv")).unwrap();
    assert_eq!(record.len(), 2001);
    let last = record.samples.last().unwrap();
    assert!((last.v_hat - last.v).norm() < 1e-6);

    let metrics: serde_json::Value = serde_json::from_str(&read(&out, "metrics.json")).unwrap();
    let rate = metrics["decay_rate"].as_f64().unwrap();
    assert!((rate - 10.0).abs() < 0.1, "{rate}");
    assert!(read(&out, "velocity.svg").contains("<polyline"));
}

#[test]
fn simulate_is_byte_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    for out in ["a", "b"] {
        let o = invobs(
            &[
                "simulate", "--t-end", "1.5", "--noise", "paper", "--seed", "5", "--out", out,
            ],
            tmp.path(),
        );
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    for name in ["trajectory.csv", "metrics.json", "velocity.svg"] {
        assert_eq!(
            read(&tmp.path().join("a"), name),
            read(&tmp.path().join("b"), name),
            "{name}"
        );
    }
}

#[test]
fn noise_changes_only_observer_side_columns() {
    let tmp = tempfile::tempdir().unwrap();
    for (mode, out) in [("off", "clean"), ("paper", "noisy")] {
        let o = invobs(
            &[
                "simulate", "--t-end", "1.5", "--noise", mode, "--seed", "3", "--out", out,
            ],
            tmp.path(),
        );
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let clean =
        TrajectoryRecord::from_csv(&read(&tmp.path().join("clean"), "trajectory.csv")).unwrap();
    let noisy =
        TrajectoryRecord::from_csv(&read(&tmp.path().join("noisy"), "trajectory.csv")).unwrap();
    assert!(!clean.is_noisy() && noisy.is_noisy());
    assert_eq!(clean.len(), noisy.len());
    for (c, n) in clean.samples.iter().zip(&noisy.samples) {
        assert_eq!((c.t, c.v, c.q, c.attitude), (n.t, n.v, n.q, n.attitude));
    }
    assert!(clean
        .samples
        .iter()
        .zip(&noisy.samples)
        .any(|(c, n)| c.v_hat != n.v_hat));
}

#[test]
fn missing_config_exits_2_naming_the_path() {
    let tmp = tempfile::tempdir().unwrap();
    let o = invobs(&["simulate", "--config", "nowhere/run.toml"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("nowhere/run.toml"), "{}", stderr(&o));
}

#[test]
fn malformed_config_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("bad.toml"), "[sim]\ndt = \"soon\"\n").unwrap();
    let o = invobs(&["simulate", "--config", "bad.toml"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bad.toml"), "{}", stderr(&o));

    let o = invobs(&["simulate", "--profile", "barrel-roll"], tmp.path());
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn blow_up_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(
        tmp.path().join("stiff.toml"),
        "[observer]\ngain = 1e200\n[sim]\nt_end = 0.1\n",
    )
    .unwrap();
    let o = invobs(&["simulate", "--config", "stiff.toml"], tmp.path());
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn verify_passes_and_reports_every_check() {
    let tmp = tempfile::tempdir().unwrap();
    let o = invobs(&["verify", "--out", "v"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = read(&tmp.path().join("v"), "verification.csv");
    let rows: Vec<_> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), CHECK_NAMES.len());
    for (row, name) in rows.iter().zip(CHECK_NAMES) {
        assert!(row.starts_with(&format!("{name},")), "{row}");
        assert!(row.ends_with(",pass"), "{row}");
    }
}

#[test]
fn verify_with_bad_frame_exits_4_naming_frame_equivariance() {
    let tmp = tempfile::tempdir().unwrap();
    let o = invobs(&["verify", "--inject-bad-frame", "--out", "v"], tmp.path());
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("frame_equivariance"), "{}", stderr(&o));
    let csv = read(&tmp.path().join("v"), "verification.csv");
    assert_eq!(csv.lines().count(), CHECK_NAMES.len() + 1);
}

#[test]
fn sweep_marks_zero_gain_invalid_and_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    for out in ["a", "b"] {
        let o = Command::new(env!("CARGO_BIN_EXE_invobs"))
            .args(["sweep", "--gains", "5,0,1", "--t-end", "2", "--out", out])
            .current_dir(tmp.path())
            .env("INVOBS_THREADS", if out == "a" { "1" } else { "3" })
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let a = read(&tmp.path().join("a"), "sweep.csv");
    assert_eq!(a, read(&tmp.path().join("b"), "sweep.csv"));
    let rows: Vec<_> = a.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    assert!(
        rows[0].starts_with("0,off,") && rows[0].contains(",invalid,"),
        "{}",
        rows[0]
    );
    assert!(rows[1].starts_with("1,off,") && rows[1].contains(",ok,"));
    assert!(rows[2].starts_with("5,off,") && rows[2].contains(",ok,"));
}

#[test]
fn sweep_with_only_invalid_points_fails() {
    let tmp = tempfile::tempdir().unwrap();
    let o = invobs(&["sweep", "--gains", "0,-1", "--t-end", "2"], tmp.path());
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn bad_thread_limit_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_invobs"))
        .args(["sweep", "--t-end", "2"])
        .current_dir(tmp.path())
        .env("INVOBS_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("INVOBS_THREADS"));
}

#[test]
fn config_file_drives_the_run() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(
        tmp.path().join("run.toml"),
        "[observer]\ngain = 4.0\n[sim]\nt_end = 3.0\n[profile]\nkind = \"doublet\"\n",
    )
    .unwrap();
    let o = invobs(
        &["simulate", "--config", "run.toml", "--out", "o"],
        tmp.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = tmp.path().join("o");
    let metrics: serde_json::Value = serde_json::from_str(&read(&out, "metrics.json")).unwrap();
    assert!((metrics["decay_rate"].as_f64().unwrap() - 4.0).abs() < 0.04);
    let manifest: serde_json::Value = serde_json::from_str(&read(&out, "manifest.json")).unwrap();
    assert_eq!(manifest["config_path"], "run.toml");
    assert_eq!(manifest["config"]["profile"]["kind"], "doublet");
}
