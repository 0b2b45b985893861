//! The `frontlab` binary: exit codes, output files and reruns.

use std::path::Path;
use std::process::{Command, Output};

fn frontlab(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_frontlab")).args(args).current_dir(cwd).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn wave_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let o = frontlab(&["wave", "--out", "w"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("w/wave.csv")).unwrap();
    assert!(csv.starts_with("xi,phi,phi_prime\n"));
    assert_eq!(csv.lines().count(), 8002);
    let record: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let c = record["summary"]["c"].as_f64().unwrap();
    assert!((c - 2f64.sqrt() / 4.0).abs() < 1e-5);
    assert_eq!(record["outputs"], serde_json::json!(["wave.csv", "wave.json"]));
    assert_eq!(record["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn out_may_name_the_main_file() {
    let dir = tempfile::tempdir().unwrap();
    let o = frontlab(&["wave", "--out", "res/profile.csv"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(dir.path().join("res/profile.csv").exists());
    assert!(dir.path().join("res/wave.json").exists());
}

#[test]
fn bad_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = frontlab(&["nonsense"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown experiment"));

    let theta = write(dir.path(), "theta.json", r#"{"nonlinearity": {"kind": "cubic", "theta": 0.6}}"#);
    let o = frontlab(&["wave", "--config", &theta], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("nonlinearity.theta"), "{}", stderr(&o));

    let kappa = write(
        dir.path(),
        "kappa.json",
        r#"{"sim1d": {"heterogeneity": {"shape": {"kind": "sigmoid", "amplitude": 0.5, "kappa": 0.9}}}}"#,
    );
    let o = frontlab(&["run1d", "--config", &kappa], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("0.5303"), "{}", stderr(&o));

    let typo = write(dir.path(), "typo.json", "{\n  \"wave\": {\"hh\": 0.01}\n}");
    let o = frontlab(&["wave", "--config", &typo], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn numerical_failure_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "tol.json", r#"{"wave": {"tol": 1e-30}}"#);
    let o = frontlab(&["wave", "--config", &cfg], dir.path());
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "run.json",
        r#"{"sim1d": {"t_end": 20, "heterogeneity": {"shape": {"kind": "sigmoid", "amplitude": 0.5, "kappa": 0.25}, "M": 20}},
            "outputs": {"cadence": 10}}"#,
    );
    for out in ["a", "b"] {
        let o = frontlab(&["run1d", "--config", &cfg, "--out", out, "--seed", "3"], dir.path());
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let mut names: Vec<_> = std::fs::read_dir(dir.path().join("a")).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names, ["run1d.json", "traj.csv", "u_t0.csv", "u_t10.csv", "u_t20.csv"]);
    for name in names {
        let a = std::fs::read(dir.path().join("a").join(&name)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(&name)).unwrap();
        assert_eq!(a, b, "{name:?} differs");
    }
    let traj = std::fs::read_to_string(dir.path().join("a/traj.csv")).unwrap();
    assert_eq!(traj.lines().next(), Some("t,chi,sup_err,w_l2,front_pos"));
    assert_eq!(traj.lines().count(), 22);
}

#[test]
fn seed_enters_the_config_hash() {
    let dir = tempfile::tempdir().unwrap();
    let hash = |seed: &str| {
        let o = frontlab(&["wave", "--out", "w", "--seed", seed], dir.path());
        let record: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        record["config_hash"].as_str().unwrap().to_string()
    };
    assert_eq!(hash("1"), hash("1"));
    assert_ne!(hash("1"), hash("2"));
}

#[test]
fn shipped_configs_validate() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        frontlab::harness::load_config(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        seen += 1;
    }
    assert!(seen >= 2);
}
