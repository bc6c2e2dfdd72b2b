use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ppl(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ppl")).args(args).current_dir(cwd).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout_json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

const HARDCORE: &str = r#"{"family":"hardcore","beta":100,"R":0.05}"#;

#[test]
fn version_and_help_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let v = ppl(&["--version"], dir.path());
    assert_eq!(v.status.code(), Some(0));
    let text = String::from_utf8_lossy(&v.stdout);
    let version = text.split_whitespace().last().unwrap();
    assert_eq!(version.split('.').filter(|s| s.parse::<u64>().is_ok()).count(), 3, "{text}");

    let h = ppl(&["--help"], dir.path());
    assert_eq!(h.status.code(), Some(0));
    let text = String::from_utf8_lossy(&h.stdout);
    for sub in ["simulate", "fit", "study", "tf-limit", "gnz-check"] {
        assert!(text.contains(sub), "{sub} missing from help");
    }
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = ppl(&["--json-errors", "study", "--scenario", "poisson", "--bogus", "1"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let line = stderr(&o);
    assert_eq!(line.trim().lines().count(), 1);
    let d: serde_json::Value = serde_json::from_str(line.trim()).unwrap();
    assert_eq!(d["flag"], "--bogus");
}

#[test]
fn study_happy_path_writes_header() {
    let dir = tempfile::tempdir().unwrap();
    let o = ppl(&["study", "--scenario", "poisson", "--n", "10", "--seed", "1", "--out", "r.csv"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("r.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "scenario,parameter,method,p,weight,loss,mse,bias_sq,variance,n_effective");
    // one progress line per replication
    assert_eq!(stderr(&o).lines().filter(|l| l.contains("replication")).count(), 10);
}

#[test]
fn study_flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = serde_json::json!({
        "scenario": "tiny",
        "model": {"family": "poisson", "alpha": 3.0, "beta": 0.0},
        "n_replications": 50,
        "k": 5,
        "p_values": [0.5],
        "weight_schemes": [{"kind": "fixed_p"}],
        "losses": [{"id": "L2"}],
        "grid": [[2.0, 3.0, 4.0], [0.0]],
        "seed": 3
    });
    fs::write(dir.path().join("cfg.json"), cfg.to_string()).unwrap();
    let o = ppl(&["study", "--scenario", "cfg.json", "--n", "4", "--out", "t.csv"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("t.csv")).unwrap();
    let row = csv.lines().nth(1).unwrap();
    assert!(row.starts_with("tiny,alpha,tf,"), "{row}");
    assert!(row.ends_with(",4"), "{row}");
}

#[test]
fn study_validation_leaves_no_output() {
    let dir = tempfile::tempdir().unwrap();
    let o = ppl(&["study", "--scenario", "poisson", "--n", "10", "--out", "r.csv"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--seed"));

    let o = ppl(&["study", "--scenario", "poisson", "--seed", "1", "--out", "missing/r.csv"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--out"));

    let o = ppl(&["study", "--scenario", "nonsense", "--seed", "1"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--scenario"));
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn simulate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |out: &str| {
        let o = ppl(&["simulate", "--model", HARDCORE, "--n", "3", "--seed", "7", "--out", out], dir.path());
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    };
    run("a");
    run("b");
    let names =
        ["manifest.json", "pattern_0000.csv", "pattern_0001.csv", "pattern_0002.csv", "pattern_0002.csv.window.json"];
    for name in names {
        let a = fs::read(dir.path().join("a").join(name)).unwrap();
        let b = fs::read(dir.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name} differs");
    }
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("a/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["files"].as_array().unwrap().len(), 3);
}

#[test]
fn simulate_rejects_bad_input_before_writing() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&[&str], &str); 4] = [
        (&["simulate", "--model", HARDCORE, "--out", "o"], "--seed"),
        (
            &[
                "simulate",
                "--model",
                r#"{"family":"strauss","beta":100,"R":0.05,"gamma":2}"#,
                "--seed",
                "1",
                "--out",
                "o",
            ],
            "--model",
        ),
        (
            &[
                "simulate",
                "--model",
                HARDCORE,
                "--seed",
                "1",
                "--window",
                r#"{"x_min":1,"x_max":0,"y_min":0,"y_max":1}"#,
                "--out",
                "o",
            ],
            "--window",
        ),
        (
            &["simulate", "--model", HARDCORE, "--seed", "1", "--mcmc-steps", "100", "--burn-in", "200", "--out", "o"],
            "--burn-in",
        ),
    ];
    for (args, flag) in cases {
        let o = ppl(args, dir.path());
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(stderr(&o).contains(flag), "{flag}: {}", stderr(&o));
    }
    assert!(!dir.path().join("o").exists());
}

#[test]
fn simulate_settings_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = serde_json::json!({"model": {"family": "poisson", "alpha": 4.0, "beta": 0.0}, "n": 2, "seed": 5, "out": "from_file"});
    fs::write(dir.path().join("sim.json"), cfg.to_string()).unwrap();
    let o = ppl(&["simulate", "--config", "sim.json", "--n", "1"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(dir.path().join("from_file/pattern_0000.csv").exists());
    assert!(!dir.path().join("from_file/pattern_0001.csv").exists());
}

#[test]
fn fit_reports_estimates() {
    let dir = tempfile::tempdir().unwrap();
    let o = ppl(&["simulate", "--model", HARDCORE, "--seed", "2", "--out", "."], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let base = ["fit", "--pattern", "pattern_0000.csv", "--family", "hardcore", "--grid", "adaptive", "--seed", "4"];
    for method in ["ppl", "tf"] {
        let o = ppl(&[&base[..], &["--method", method]].concat(), dir.path());
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let v = stdout_json(&o);
        assert_eq!(v["method"], method);
        let r = v["theta_hat"]["R"].as_f64().unwrap();
        assert!(r > 0.0 && r <= 0.06, "{v}");
        assert!(v["theta_hat"]["beta"].as_f64().unwrap() > 0.0);
        assert!(v["objective"].as_f64().unwrap() >= 0.0);
    }
    let a = ppl(&base, dir.path());
    let b = ppl(&base, dir.path());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn fit_validation_names_the_flag() {
    let dir = tempfile::tempdir().unwrap();
    let o = ppl(
        &["--json-errors", "fit", "--family", "strauss", "--p", "1.5", "--grid", "[[100],[0.05],[0.5]]", "--seed", "1"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    let d: serde_json::Value = serde_json::from_str(stderr(&o).trim()).unwrap();
    assert_eq!(d["flag"], "--p");
    assert!(d["message"].as_str().unwrap().contains("(0, 1)"));

    let cases: [(&[&str], &str); 5] = [
        (&["fit", "--family", "cox", "--seed", "1"], "--family"),
        (&["fit", "--family", "strauss", "--grid", "[[1],[2]]", "--seed", "1"], "--grid"),
        (&["fit", "--family", "strauss", "--grid", "adaptive", "--seed", "1"], "--grid"),
        (&["fit", "--family", "poisson", "--loss", "l4", "--grid", "[[1],[2]]", "--seed", "1"], "--loss"),
        (&["fit", "--family", "poisson", "--grid", "[[1],[2]]", "--seed", "1", "--pattern", "nope.csv"], "--pattern"),
    ];
    for (args, flag) in cases {
        let o = ppl(args, dir.path());
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(stderr(&o).contains(flag), "{flag}: {}", stderr(&o));
    }
}

#[test]
fn fit_runtime_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("one.csv"), "x,y\n0.5,0.5\n").unwrap();
    let o =
        ppl(&["fit", "--pattern", "one.csv", "--family", "hardcore", "--grid", "adaptive", "--seed", "1"], dir.path());
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
}

#[test]
fn tf_limit_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = serde_json::json!({"mcmc": {"n_steps": 2000, "burn_in": 1000}, "dummy_resolution": 16});
    fs::write(dir.path().join("lim.json"), cfg.to_string()).unwrap();
    let args = [
        "tf-limit",
        "--scenario",
        "strauss",
        "--k-list",
        "4,16",
        "--mode",
        "block",
        "--reps",
        "3",
        "--seed",
        "1",
        "--config",
        "lim.json",
        "--out",
        "lim.csv",
    ];
    let o = ppl(&args, dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("lim.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "k,median_abs_d,n_reps");
    assert!(lines[1].starts_with("4,") && lines[2].starts_with("16,") && lines[2].ends_with(",3"));

    let o = ppl(
        &["tf-limit", "--scenario", "strauss", "--k-list", "4,8", "--mode", "block", "--seed", "1", "--out", "bad.csv"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--k-list"));
    assert!(!dir.path().join("bad.csv").exists());
}

#[test]
fn gnz_check_prints_summary() {
    let dir = tempfile::tempdir().unwrap();
    let o = ppl(&["gnz-check", "--scenario", "poisson", "--reps", "30", "--seed", "9"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = stdout_json(&o);
    assert_eq!(v["n_reps"], 30);
    assert!(v["se"].as_f64().unwrap() > 0.0);
    assert!(v["mean"].as_f64().unwrap().abs() < 5.0 * v["se"].as_f64().unwrap(), "{v}");

    let o = ppl(&["gnz-check", "--scenario", "poisson", "--reps", "5", "--seed", "9"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--reps"));
}
