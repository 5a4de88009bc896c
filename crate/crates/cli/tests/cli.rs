use std::fs;
use std::process::Command;

fn riskbench() -> Command {
    Command::new(env!("CARGO_BIN_EXE_riskbench"))
}

#[test]
fn list_presets_prints_every_id() {
    let out = riskbench().arg("list-presets").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for id in riskbench_core::io::preset_ids() {
        assert!(text.lines().any(|l| l.trim() == id), "missing {id}");
    }
}

#[test]
fn simulate_preset_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let status = riskbench()
        .args(["simulate", "--preset", "fig3a", "--runs", "8", "--horizon", "500", "--out-dir"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    for name in ["curves.csv", "runs.csv", "curves.svg", "config.toml"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    let csv = fs::read_to_string(dir.path().join("curves.csv")).unwrap();
    assert!(csv.starts_with("t,arm,p_hat,ci_lo,ci_hi,cum_share"));

    // The echoed config replays to the same curves.
    let again = tempfile::tempdir().unwrap();
    let status = riskbench()
        .args(["simulate", "--sequential", "--config"])
        .arg(dir.path().join("config.toml"))
        .arg("--out-dir")
        .arg(again.path())
        .status()
        .unwrap();
    assert!(status.success());
    assert_eq!(csv, fs::read_to_string(again.path().join("curves.csv")).unwrap());
}

#[test]
fn invalid_config_exits_one_with_violations() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(
        &cfg,
        "horizon = 0\narms = [{ kind = \"uniform\", lo = 1.0, hi = -1.0 }]\n[policy]\nvariant = \"plain\"\n",
    )
    .unwrap();
    let out = riskbench()
        .args(["simulate", "--config"])
        .arg(&cfg)
        .arg("--out-dir")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("horizon"), "{err}");
}

#[test]
fn missing_config_file_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = riskbench()
        .args(["simulate", "--config"])
        .arg(dir.path().join("absent.toml"))
        .arg("--out-dir")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_preset_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = riskbench()
        .args(["simulate", "--preset", "nope", "--out-dir"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn walk_writes_sign_profile() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("walk.csv");
    let out = riskbench()
        .args([
            "walk",
            "--increments",
            "{kind = \"rademacher\"}",
            "--horizon",
            "1000",
            "--runs",
            "200",
            "--out",
        ])
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,p_positive,p_zero,p_negative,mean_tau"));
    for line in lines {
        let f: Vec<f64> = line.split(',').skip(1).take(3).map(|x| x.parse().unwrap()).collect();
        assert!((f.iter().sum::<f64>() - 1.0).abs() < 1e-9, "{line}");
    }
}
