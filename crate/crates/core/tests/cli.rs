use std::process::{Command, Output};

fn skeleton(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skeleton"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn verify_passes_at_default_resolution() {
    let out = skeleton(&["verify"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("0 failed"));
}

#[test]
fn verify_fails_on_a_coarse_rule() {
    let out = skeleton(&["verify", "--n-nodes", "16", "--format", "json"]);
    assert_eq!(code(&out), 1);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let checks = report["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["pass"] == false));
    for key in ["name", "expected", "measured", "tol", "pass"] {
        assert!(checks[0].get(key).is_some(), "{key}");
    }
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL"));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["bogus"],
        vec!["sweep", "--n-nodes", "8"],
        vec!["sweep", "--n-nodes", "many"],
        vec!["sweep", "--theta-range", "0:1:3"],
        vec!["sweep", "--theta-range", "1:2"],
        vec!["sweep", "--sector", "+1"],
        vec!["sweep", "--format", "xml"],
        vec!["sweep", "--margin", "0"],
        vec!["spectrum"],
        vec!["general", "--angles", "1,1,1"],
        vec!["sweep", "--config", "/nonexistent/run.cfg"],
    ] {
        assert_eq!(code(&skeleton(&args)), 2, "{args:?}");
    }
}

#[test]
fn numerical_failure_exits_3() {
    // the (−,−) sector has no bound state at the right angle
    let out = skeleton(&[
        "reconstruct",
        "--theta",
        "pi/2",
        "--sector=-1,-1",
        "--n-nodes",
        "100",
    ]);
    assert_eq!(code(&out), 3);
}

#[test]
fn sweep_right_angle_row() {
    let out = skeleton(&["sweep", "--theta", "pi/2"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "theta_rad,alpha,beta,index,k,energy,refine_err");
    assert_eq!(lines.len(), 2, "{text}");
    assert!(lines[1].starts_with("1.5707963,+1,+1,0,1.000000,-1.000000,"));
}

#[test]
fn plus_minus_sector_opens_past_critical_angle() {
    let rows = |theta: &str| {
        let out = skeleton(&[
            "sweep",
            "--theta",
            theta,
            "--sector",
            "+1,-1",
            "--n-nodes",
            "200",
        ]);
        assert_eq!(code(&out), 0);
        stdout(&out).lines().count() - 1
    };
    assert_eq!(rows("0.6pi"), 0);
    assert_eq!(rows("0.7pi"), 1);
}

#[test]
fn output_is_deterministic_and_json_mirrors_csv() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = |p: &std::path::Path| {
        vec![
            "sweep".to_string(),
            "--theta-range".into(),
            "0.7pi:0.9pi:5".into(),
            "--n-nodes".into(),
            "200".into(),
            "--out".into(),
            p.display().to_string(),
        ]
    };
    for p in [&a, &b] {
        let out = Command::new(env!("CARGO_BIN_EXE_skeleton"))
            .args(args(p))
            .output()
            .unwrap();
        assert_eq!(code(&out), 0);
    }
    let (x, y) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert!(!x.is_empty());
    assert_eq!(x, y);

    let out = skeleton(&[
        "sweep",
        "--theta-range",
        "0.7pi:0.9pi:5",
        "--n-nodes",
        "200",
        "--format",
        "json",
    ]);
    let rows: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(
        rows.len(),
        String::from_utf8(x).unwrap().lines().count() - 1
    );
    let keys: Vec<&str> = rows[0]
        .as_object()
        .unwrap()
        .keys()
        .map(String::as_str)
        .collect();
    for key in "theta_rad,alpha,beta,index,k,energy,refine_err".split(',') {
        assert!(keys.contains(&key), "{key}");
    }
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "# right angle\nn_nodes = 150\ntheta = pi/2\nformat = json\n",
    )
    .unwrap();
    let path = cfg.display().to_string();
    let json = skeleton(&["sweep", "--config", &path]);
    assert_eq!(code(&json), 0);
    assert!(stdout(&json).trim_start().starts_with('['));
    let csv = skeleton(&["sweep", "--config", &path, "--format", "csv"]);
    assert!(stdout(&csv).starts_with("theta_rad,"));
}

#[test]
fn critical_angle_and_general() {
    let out = skeleton(&["critical-angle", "--n-nodes", "200"]);
    assert_eq!(code(&out), 0);
    let line = stdout(&out).lines().nth(1).unwrap().to_string();
    let theta: f64 = line.split(',').next().unwrap().parse().unwrap();
    assert!((theta - 2.0 * std::f64::consts::PI / 3.0).abs() < 1e-6);

    let out = skeleton(&[
        "general",
        "--lambda",
        "-1",
        "--k-range",
        "1.35:1.48:3",
        "--n-nodes",
        "200",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains(",-2.000000,"), "{}", stdout(&out));
}

#[test]
fn reconstruct_reports_symmetric_grid() {
    let out = skeleton(&[
        "reconstruct",
        "--theta",
        "pi/2",
        "--sector",
        "+1,+1",
        "--grid",
        "2:5",
        "--n-nodes",
        "200",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("x,y,psi"));
    assert_eq!(text.lines().count(), 26);
    assert!(String::from_utf8_lossy(&out.stderr).contains("parity defects"));
}

#[test]
fn spectrum_lists_top_eigenvalues() {
    let out = skeleton(&[
        "spectrum",
        "--theta",
        "pi/2",
        "--sector",
        "+1,+1",
        "--n-nodes",
        "100",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let first = text.lines().nth(1).unwrap();
    let value: f64 = first.split(',').nth(4).unwrap().parse().unwrap();
    assert!((value - 1.0).abs() < 1e-9);
    assert!(first.ends_with("true"));
}
