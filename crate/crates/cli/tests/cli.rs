use std::path::Path;
use std::process::{Command, Output};

fn uav_noma(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uav-noma"))
        .args(args)
        .current_dir(dir)
        .env_remove("UAV_NOMA_WORKERS")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

const SMALL_SNR: &str = r#"{
    "experiment": { "snr_db": { "start": 0, "stop": 20, "step": 10 } },
    "trials": { "trials": 4000, "seed": 9 }
}"#;

#[test]
fn lists_presets() {
    let dir = tempfile::tempdir().unwrap();
    let out = uav_noma(&["presets"], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["fig2a", "fig2b", "fig3", "fig4a", "fig4b", "moments"] {
        assert!(text.lines().any(|l| l == name), "missing {name}");
    }
}

#[test]
fn preset_with_override_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "small.json", SMALL_SNR);
    let out = uav_noma(&["run", "--preset", "fig2a", "--config", &cfg, "--output", "out.csv"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("out.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "snr_db,scheme,condition,asr_analytical,asr_mc,mc_stderr");
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3 * 2);
    for row in &rows {
        assert_eq!(row.len(), 6);
        let closed: f64 = row[3].parse().unwrap();
        let mc: f64 = row[4].parse().unwrap();
        let se: f64 = row[5].parse().unwrap();
        assert!(closed > 0.0 && mc > 0.0 && se > 0.0);
    }
}

#[test]
fn csv_is_independent_of_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "small.json", SMALL_SNR);
    let mut outputs = Vec::new();
    for workers in ["1", "3", "8"] {
        let out = uav_noma(&["run", "-p", "fig2b", "-c", &cfg, "--workers", workers, "-q", "-o", "w.csv"], dir.path());
        assert!(out.status.success());
        outputs.push(std::fs::read(dir.path().join("w.csv")).unwrap());
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn csv_goes_to_stdout_without_output_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "analytic.json",
        r#"{
            "experiment": { "kind": "kappa-sweep", "kappa": { "start": 0, "stop": 0.2, "step": 0.1 } },
            "network": { "power_allocation": [0.6, 0.3, 0.1], "snr_db": 20 },
            "fading": { "alpha": 2, "beta": 3, "nu": 3 }
        }"#,
    );
    let out = uav_noma(&["run", "-c", &cfg, "-q"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = String::from_utf8(out.stdout).unwrap();
    let values: Vec<f64> = csv.lines().skip(1).map(|l| l.split(',').nth(3).unwrap().parse().unwrap()).collect();
    assert_eq!(values.len(), 3);
    assert!(values.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn seed_override_changes_monte_carlo_only() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "small.json", SMALL_SNR);
    let a = uav_noma(&["run", "-p", "fig2a", "-c", &cfg, "-q", "-o", "a.csv"], dir.path());
    let b = uav_noma(&["run", "-p", "fig2a", "-c", &cfg, "-q", "-o", "b.csv", "--seed", "10"], dir.path());
    assert!(a.status.success() && b.status.success());
    let read = |f: &str| std::fs::read_to_string(dir.path().join(f)).unwrap();
    let (a, b) = (read("a.csv"), read("b.csv"));
    assert_ne!(a, b);
    let col = |csv: &str, i: usize| csv.lines().map(|l| l.split(',').nth(i).unwrap().to_string()).collect::<Vec<_>>();
    assert_eq!(col(&a, 3), col(&b, 3));
}

fn expect_failure(args: &[&str], config: Option<&str>, code: i32, category: &str) {
    let dir = tempfile::tempdir().unwrap();
    let mut full: Vec<String> = args.iter().map(|s| s.to_string()).collect();
    if let Some(text) = config {
        full.push("-c".into());
        full.push(write_config(dir.path(), "bad.json", text));
    }
    let refs: Vec<&str> = full.iter().map(String::as_str).collect();
    let out = uav_noma(&refs, dir.path());
    assert_eq!(out.status.code(), Some(code), "{}", String::from_utf8_lossy(&out.stderr));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.starts_with(&format!("error[{category}]")), "{stderr}");
}

#[test]
fn malformed_config_is_a_config_error() {
    expect_failure(&["run"], Some("{ not json"), 3, "config");
    expect_failure(&["run", "-p", "fig2a"], Some(r#"{"network": {"snr": 3}}"#), 3, "config");
    expect_failure(&["run", "-p", "no-such-preset"], None, 3, "config");
}

#[test]
fn invalid_parameters_are_validation_errors() {
    expect_failure(&["run", "-p", "fig2a"], Some(r#"{"network": {"power_allocation": [0.3, 0.7]}}"#), 4, "validation");
    expect_failure(&["run", "-p", "fig3"], Some(r#"{"fading": {"alpha": 2.5}}"#), 4, "validation");
}

#[test]
fn zero_workers_is_an_argument_error() {
    expect_failure(&["run", "-p", "fig2a", "--workers", "0"], None, 7, "argument");
}

#[test]
fn missing_config_file_is_an_io_error() {
    expect_failure(&["run", "-c", "/nonexistent/cfg.json"], None, 6, "io");
}

#[test]
fn workers_env_is_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_uav-noma"))
        .args(["run", "-p", "fig2a", "--trials", "0", "-q"])
        .env("UAV_NOMA_WORKERS", "0")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(7));
}
