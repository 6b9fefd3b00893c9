use std::path::Path;
use std::process::{Command, Output};

fn cli(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_congruent"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("run cli")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.json");
    std::fs::write(&path, body).unwrap();
    path.display().to_string()
}

const SMALL: &str = r#"{"n":3,"semi_axes":[3,2,1],"delta":"auto","epsilon":0.01,"directions":25,"subsphere_samples":400,"seed":7,"suites":["sections-O","projections-O","distinctness"]}"#;

#[test]
fn verify_passes_and_prints_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = cli(&["verify", "--config", &cfg], dir.path());
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["pass"], true);
    assert_eq!(report["suites"].as_array().unwrap().len(), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("sections-O"));
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    for (bad, needle) in [
        (
            SMALL.replace("[3,2,1]", "[3,3,1]"),
            "semi_axes must be strictly decreasing",
        ),
        (
            SMALL.replace(r#""delta":"auto""#, r#""delta":0.6"#),
            "delta exceeds max_delta 0.5",
        ),
        (
            SMALL.replace(r#""seed":7"#, r#""seed":7,"extra":1"#),
            "extra",
        ),
        (
            SMALL.replace(r#""directions":25"#, r#""directions":"many""#),
            "directions",
        ),
    ] {
        let cfg = write_config(dir.path(), &bad);
        let out = cli(&["verify", "--config", &cfg], dir.path());
        assert_eq!(out.status.code(), Some(2));
        assert!(
            String::from_utf8_lossy(&out.stderr).contains(needle),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let out = cli(&["verify", "--config", "missing.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = cli(&["verify"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn suite_failure_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &SMALL.replace(r#""sections-O","#, r#""sections-SO","#),
    );
    let out = cli(&["verify", "--config", &cfg, "--out", "r.json"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let text = std::fs::read_to_string(dir.path().join("r.json")).unwrap();
    assert!(text.contains("unsupported-dimension"));
}

#[test]
fn seed_override_and_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let a = cli(&["verify", "--config", &cfg, "--jobs", "1"], dir.path());
    let b = cli(&["verify", "--config", &cfg, "--jobs", "4"], dir.path());
    let c = cli(&["verify", "--config", &cfg, "--seed", "8"], dir.path());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let report: serde_json::Value = serde_json::from_slice(&c.stdout).unwrap();
    assert_eq!(report["config"]["seed"], 8);
}

#[test]
fn report_writes_json_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = cli(
        &[
            "report",
            "--config",
            &cfg,
            "--out",
            "report.json",
            "--csv",
            "residuals.csv",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("residuals.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 25);
    assert!(dir.path().join("report.json").exists());
}

#[test]
fn export_mesh_writes_off() {
    let dir = tempfile::tempdir().unwrap();
    for body in ["K", "L", "E"] {
        let out = cli(
            &[
                "export-mesh",
                "--body",
                body,
                "--level",
                "2",
                "--out",
                "m.off",
            ],
            dir.path(),
        );
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        let text = std::fs::read_to_string(dir.path().join("m.off")).unwrap();
        assert!(text.starts_with("OFF\n162 320 0\n"));
    }
    let cfg = write_config(
        dir.path(),
        &SMALL.replace(
            r#""n":3,"semi_axes":[3,2,1]"#,
            r#""n":4,"semi_axes":[4,3,2,1]"#,
        ),
    );
    let out = cli(
        &[
            "export-mesh",
            "--body",
            "K",
            "--out",
            "m.off",
            "--config",
            &cfg,
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("n = 3"));
}

#[test]
fn construct_prints_parameters_and_gaps() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = cli(&["construct", "--config", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let bump = v["parameters"]["bump_height"].as_f64().unwrap();
    assert!((bump - 0.01 * 0.4f64.powi(3)).abs() < 1e-15);
    for g in v["distinctness"].as_array().unwrap() {
        assert!((g["d_id"].as_f64().unwrap() - bump).abs() <= 1e-6 * bump);
        assert!((g["d_neg"].as_f64().unwrap() - bump).abs() <= 1e-6 * bump);
    }
}
