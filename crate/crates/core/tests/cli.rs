use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn orbicount(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orbicount")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).expect("report exists")).expect("valid json")
}

fn path(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

#[test]
fn build_reports_exceptional_triangle_group() {
    let dir = tempfile::tempdir().unwrap();
    let out = orbicount(&["build", "g=0", "cones=2,3,7", "--out", path(dir.path())]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&dir.path().join("build.json"));
    assert_eq!(v["exceptional"], true);
    assert_eq!(v["preset"], false);
    assert!(v["relator_residual"].as_f64().unwrap() <= 1e-9);
    assert_eq!(v["discreteness"]["pass"], true);
    for a in v["elliptic_angles"].as_array().unwrap() {
        assert!(a["error"].as_f64().unwrap() <= 1e-9);
    }
    let log = fs::read_to_string(dir.path().join("orbicount.log")).unwrap();
    assert!(log.trim_end().ends_with("build ok"), "{log}");
}

#[test]
fn enumerate_count_fit_pipeline_is_deterministic() {
    let runs: Vec<_> = (0..2).map(|_| tempfile::tempdir().unwrap()).collect();
    for dir in &runs {
        let d = path(dir.path());
        let out = orbicount(&["enumerate", "--signature", "g=1 cones=3", "--seed", "a", "--bound", "40", "--out", d]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        let out = orbicount(&["count", "--signature", "g=1 cones=3", "--out", d]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
    for file in ["orbit.ckpt", "orbit.json", "counts.csv", "fit.json"] {
        let a = fs::read(runs[0].path().join(file)).unwrap();
        let b = fs::read(runs[1].path().join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between runs");
    }
    let orbit = json(&runs[0].path().join("orbit.json"));
    assert_eq!(orbit["status"], "complete");
    assert_eq!(orbit["stabilized"], true);
    let fit = json(&runs[0].path().join("fit.json"));
    let e = fit["exponent"].as_f64().unwrap();
    assert!((1.6..=2.4).contains(&e), "{e}");
    assert!(!fit["homogeneity"]["ratios"].as_array().unwrap().is_empty());

    let refit = orbicount(&["fit", path(&runs[0].path().join("counts.csv")), "--out", path(runs[1].path())]);
    assert_eq!(code(&refit), 0);
}

#[test]
fn budget_interrupt_then_resume_matches_single_run() {
    let dir = tempfile::tempdir().unwrap();
    let whole = dir.path().join("whole");
    let parts = dir.path().join("parts");
    let base = ["enumerate", "--signature", "g=1 cones=3", "--seed", "a^2 b^2", "--bound", "60"];
    let run = |extra: &[&str]| {
        let mut args = base.to_vec();
        args.extend_from_slice(extra);
        orbicount(&args)
    };
    assert_eq!(code(&run(&["--out", path(&whole)])), 0);
    let first = run(&["--out", path(&parts), "--budget", "100"]);
    assert_eq!(code(&first), 0);
    assert_eq!(json(&parts.join("orbit.json"))["status"], "interrupted");
    let ckpt = parts.join("orbit.ckpt");
    assert_eq!(code(&run(&["--out", path(&parts), "--resume", path(&ckpt)])), 0);
    assert_eq!(fs::read(whole.join("orbit.ckpt")).unwrap(), fs::read(&ckpt).unwrap());
}

#[test]
fn empty_checkpoint_gives_zero_counts_and_module_error() {
    let dir = tempfile::tempdir().unwrap();
    let ckpt = dir.path().join("empty.ckpt");
    let hash = {
        let out = orbicount(&["build", "g=1", "cones=3", "--out", path(dir.path())]);
        assert_eq!(code(&out), 0);
        json(&dir.path().join("build.json"))["signature_hash"].as_str().unwrap().to_string()
    };
    fs::write(&ckpt, format!("orbicount-orbit v1 {hash} L=30 slack=1\n")).unwrap();
    let out = orbicount(&["count", "--signature", "g=1 cones=3", "--checkpoint", path(&ckpt), "--out", path(dir.path())]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("counting::InsufficientData"));
    let csv = fs::read_to_string(dir.path().join("counts.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.split(',').nth(1) == Some("0")), "{csv}");
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "signature = \"g=1 cones=3\"\nbound = \"forty\"\n").unwrap();
    let out = orbicount(&["enumerate", "--config", path(&cfg), "--out", path(dir.path())]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2 column"));

    fs::write(&cfg, "signature = \"g=1 cones=3\"\nseed = \"a\"\nbound = 30.0\n").unwrap();
    assert_eq!(code(&orbicount(&["enumerate", "--config", path(&cfg), "--out", path(dir.path())])), 0);
    let wrong = orbicount(&["count", "--config", path(&cfg), "--functional", "word", "--out", path(dir.path())]);
    assert_eq!(code(&wrong), 2);
}

#[test]
fn verify_geometry_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, body: &str| {
        let p = dir.path().join(name);
        fs::write(&p, body).unwrap();
        p
    };
    let good = write("good.json", r#"{"name":"good","group":"g=1 cones=3","checks":["claim","profile","clairaut"]}"#);
    let out = orbicount(&["verify-geometry", path(&good), "--out", path(dir.path())]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.lines().any(|l| l == "PASS good Claim"), "{stdout}");
    assert_eq!(json(&dir.path().join("verify-good.json"))["pass"], true);

    let no_control = write(
        "nospiral.json",
        r#"{"name":"nospiral","group":"g=1 cones=3","checks":["quasigeodesic"],"fixtures":{"spiral_turns":[]}}"#,
    );
    assert_eq!(code(&orbicount(&["verify-geometry", path(&no_control), "--out", path(dir.path())])), 4);

    let typo = write("typo.json", r#"{"name":"typo","grup":"g=1 cones=3"}"#);
    assert_eq!(code(&orbicount(&["verify-geometry", path(&typo), "--out", path(dir.path())])), 2);
}
