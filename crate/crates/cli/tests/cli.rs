use std::path::Path;
use std::process::{Command, Output};

fn nlsd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlsd")).args(args).output().expect("binary runs")
}

fn simulate(dir: &Path, name: &str, phi: &str, psi: &str, dist: &str, t: &str, seed: &str) -> String {
    let path = dir.join(name);
    let p = path.to_str().unwrap().to_string();
    let mut args = vec!["simulate", "--dist", dist, "--t", t, "--seed", seed, "--out", &p];
    if !phi.is_empty() {
        args.extend(["--phi", phi]);
    }
    args.extend(["--psi", psi]);
    let out = nlsd(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    p
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

#[test]
fn alpha_outside_unit_interval_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let data = simulate(dir.path(), "y.csv", "", "0.5", "laplace", "200", "1");
    for alpha in ["0", "1", "1.5", "-0.1"] {
        let out = nlsd(&["test", "--data", &data, "--alpha", alpha]);
        assert_eq!(out.status.code(), Some(2), "alpha {alpha}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("alpha"));
    }
}

#[test]
fn unknown_estimator_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let data = simulate(dir.path(), "y.csv", "", "0.5", "laplace", "200", "1");
    let out = nlsd(&["fit", "--data", &data, "--estimator", "mle"]);
    assert_eq!(out.status.code(), Some(2));
    let out = nlsd(&["fit", "--data", &data, "--model", "ARMA(1,1)"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exit_code_reflects_the_decision() {
    let dir = tempfile::tempdir().unwrap();
    let noise = simulate(dir.path(), "noise.csv", "", "0", "uniform", "500", "3");
    let bubbles = simulate(dir.path(), "bubbles.csv", "", "0.9", "t:3", "1000", "3");
    let quiet = nlsd(&["test", "--data", &noise]);
    assert_eq!(quiet.status.code(), Some(0));
    assert_eq!(json(&quiet)["report"]["reject"], false);
    let loud = nlsd(&["test", "--data", &bubbles]);
    assert_eq!(loud.status.code(), Some(1));
    assert_eq!(json(&loud)["report"]["df"], 4.0);
}

#[test]
fn bootstrap_reports_are_byte_identical_for_a_fixed_seed() {
    let dir = tempfile::tempdir().unwrap();
    let data = simulate(dir.path(), "y.csv", "", "0.6", "t:5", "150", "11");
    let run = |out: &str| {
        let o = dir.path().join(out);
        let r = nlsd(&[
            "test",
            "--data",
            &data,
            "--mode",
            "bootstrap",
            "--h",
            "2",
            "--replicates",
            "20",
            "--seed",
            "5",
            "--out",
            o.to_str().unwrap(),
        ]);
        assert!(r.status.code() == Some(0) || r.status.code() == Some(1), "{}", String::from_utf8_lossy(&r.stderr));
        let read = |f: &str| std::fs::read_to_string(o.join(f)).unwrap();
        (String::from_utf8(r.stdout).unwrap(), read("results.json"), read("manifest.json"))
    };
    let (a, b) = (run("a"), run("b"));
    assert!(a == b, "reports differ between identical runs");
}

#[test]
fn fit_reports_roots_of_a_synthetic_mar11() {
    let dir = tempfile::tempdir().unwrap();
    let data = simulate(dir.path(), "al.csv", "0.41", "0.87", "t:3.9", "2000", "7");
    let out_dir = dir.path().join("fit");
    let out = nlsd(&[
        "fit",
        "--data",
        &data,
        "--model",
        "MAR(1,1)",
        "--transforms",
        "identity,log-square",
        "--h",
        "9",
        "--spec-test",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.code() == Some(0) || out.status.code() == Some(1));
    let v = json(&out);
    let causal = v["roots"]["causal"][0]["modulus"].as_f64().unwrap();
    let noncausal = v["roots"]["noncausal"][0]["modulus"].as_f64().unwrap();
    assert!((causal - 2.43).abs() < 0.15, "causal root {causal}");
    assert!((noncausal - 1.14).abs() < 0.05, "noncausal root {noncausal}");
    assert_eq!(v["spec_test"]["df"], 34.0);
    let table = std::fs::read_to_string(out_dir.join("table.csv")).unwrap();
    assert!(table.starts_with("t,y,residual,v1,v2\n"));
    assert_eq!(table.lines().count(), 2001);
}

#[test]
fn ols_fit_returns_one_coefficient() {
    let dir = tempfile::tempdir().unwrap();
    let data = simulate(dir.path(), "y.csv", "", "0.5", "laplace", "400", "2");
    let out = nlsd(&["fit", "--data", &data, "--model", "MAR(0,1)", "--estimator", "ols"]);
    assert_eq!(out.status.code(), Some(0));
    let est = json(&out)["estimate"].as_object().unwrap().clone();
    assert_eq!(est.len(), 1);
    assert!((est["psi1"].as_f64().unwrap() - 0.5).abs() < 0.15);
}

#[test]
fn single_replication_table_runs_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("mc");
    let out = nlsd(&["mc", "--preset", "table2", "--reps", "1", "--t", "100", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["results.json", "table.csv", "manifest.json"] {
        assert!(out_dir.join(f).exists(), "{f}");
    }
    let manifest: serde_json::Value = serde_json::from_slice(&std::fs::read(out_dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "mc");
    assert!(manifest["files"]["table.csv"].as_str().unwrap().len() == 64);
}

#[test]
fn config_file_overrides_a_preset() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "preset = \"table1\"\nreps = 20\nt = [100]\ndists = [\"laplace\"]\n").unwrap();
    let out = nlsd(&["mc", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.contains("laplace"));
    assert!(!csv.contains("uniform"));
}
