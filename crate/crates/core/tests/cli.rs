use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use kleincount::formats::{config_digest, sha256_hex, sidecar_path, Sidecar};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kleincount")).current_dir(dir).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn sidecar(path: &Path) -> Sidecar {
    serde_json::from_str(&fs::read_to_string(sidecar_path(path)).unwrap()).unwrap()
}

fn generate(dir: &Path, out: &str, t: &str, extra: &[&str]) -> Output {
    let mut args = vec!["generate", "--packing", "strip-apollonian", "--max-curv", t, "--window", "-1,0,1,2", "--out", out];
    args.extend_from_slice(extra);
    run(dir, &args)
}

#[test]
fn generate_writes_exact_rows_and_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let o = generate(dir.path(), "s.csv", "64", &["--backend", "exact"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(dir.path().join("s.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("kind,b,bbar,wx,wy"));
    assert!(lines.all(|l| l.split(',').skip(1).all(|f| f.contains('/'))));
    let side = sidecar(&dir.path().join("s.csv"));
    assert!(side.provenance.unwrap().complete);
}

#[test]
fn generate_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["generate", "--packing", "strip-apollonian", "--max-curv", "64", "--out", "x.csv"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    let o = generate(dir.path(), "x.csv", "64", &["--packing", "nope"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn strict_cutoff_keeps_only_the_lines() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&generate(dir.path(), "one.csv", "1", &[])), 0);
    let text = fs::read_to_string(dir.path().join("one.csv")).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.starts_with("line,")));
}

#[test]
fn count_fit_and_refusals() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&generate(d, "big.csv", "16384", &[])), 0);
    let o = run(d, &["count", "--input", "big.csv", "--mode", "curvature", "--region", "rect:-1,0.2,1,1.8", "--ladder", "pow2:3:14", "--out", "c.csv"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read_to_string(d.join("c.csv")).unwrap().lines().count(), 13);

    let o = run(d, &["fit", "--input", "c.csv", "--drop-low", "0.5", "--out", "f.json"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("verdict: PASS"));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("f.json")).unwrap()).unwrap();
    for key in ["exponent", "stderr", "r2", "window", "n_points", "coefficient"] {
        assert!(report.get(key).is_some(), "{key}");
    }

    let hyp = run(d, &["count", "--input", "big.csv", "--mode", "hyparea", "--t-ladder", "pow2neg:2:16"]);
    assert_eq!(code(&hyp), 2);
    let geo = run(d, &["count", "--input", "big.csv", "--mode", "geodesic", "--region", "rect:-1,0.2,1,1.8", "--ladder", "0.5,1"]);
    assert_eq!(code(&geo), 2);
    assert_eq!(code(&generate(d, "small.csv", "64", &[])), 0);
    let short = run(d, &["count", "--input", "small.csv", "--region", "rect:-1,0.2,1,1.8", "--ladder", "pow2:3:14"]);
    assert_eq!(code(&short), 3);
    let probe = run(d, &["probe", "--input", "big.csv", "--region", "rect:-0.5,0.5,0.5,1.5", "--eps-ladder", "0.01,0.02"]);
    assert_eq!(code(&probe), 2);
}

#[test]
fn dim_of_a_line_is_one() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let spec = r#"{"name": "line", "monotone": true,
        "seeds": [["3/5", "0", "1", "0"]], "mirrors": [["3/5", "0", "1", "0"]]}"#;
    fs::write(d.join("line.json"), spec).unwrap();
    let o = run(d, &["generate", "--generators", "line.json", "--max-curv", "100000", "--window", "-1,0,1,2", "--out", "l.csv"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(d, &["dim", "--input", "l.csv", "--scales", "pow2neg:4:9"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((report["alpha_hat"].as_f64().unwrap() - 1.0).abs() < 0.05);
}

#[test]
fn outputs_are_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&generate(d, "a.csv", "3000", &["--threads", "1"])), 0);
    assert_eq!(code(&generate(d, "b.csv", "3000", &["--threads", "4"])), 0);
    assert_eq!(fs::read(d.join("a.csv")).unwrap(), fs::read(d.join("b.csv")).unwrap());
    assert_eq!(fs::read(sidecar_path(&d.join("a.csv"))).unwrap(), fs::read(sidecar_path(&d.join("b.csv"))).unwrap());
}

#[test]
fn sidecar_digests_recompute() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&generate(d, "s.csv", "200", &[])), 0);
    let o = run(d, &["count", "--input", "s.csv", "--region", "disk:0,1,0.5", "--ladder", "pow2:2:7", "--out", "c.csv"]);
    assert_eq!(code(&o), 0);
    for name in ["s.csv", "c.csv"] {
        let side = sidecar(&d.join(name));
        assert_eq!(side.content_sha256, sha256_hex(&fs::read(d.join(name)).unwrap()));
        assert_eq!(side.input_digest, config_digest(&side.config));
    }
    let side = sidecar(&d.join("c.csv"));
    assert_eq!(side.config["input-sha256"], sha256_hex(&fs::read(d.join("s.csv")).unwrap()));
    // a tampered input is refused
    fs::write(d.join("s.csv"), "kind,b,bbar,wx,wy\n").unwrap();
    let o = run(d, &["count", "--input", "s.csv", "--region", "disk:0,1,0.5", "--ladder", "pow2:2:7"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("run.cfg"), "verb = generate\npacking = strip-apollonian\nmax-curv = 10\nwindow = -1,0,1,2\nout = a.csv\n").unwrap();
    assert_eq!(code(&run(d, &["--config", "run.cfg"])), 0);
    assert_eq!(code(&run(d, &["--config", "run.cfg", "--max-curv", "40", "--out", "b.csv"])), 0);
    let a = sidecar(&d.join("a.csv")).provenance.unwrap();
    let b = sidecar(&d.join("b.csv")).provenance.unwrap();
    assert_eq!(a.max_curvature, Some(10.0));
    assert_eq!(b.max_curvature, Some(40.0));
}
