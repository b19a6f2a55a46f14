//! End-to-end runs of the `diverscope` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_diverscope"));
    cmd.env_remove("DIVERSCOPE_THREADS");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn diverscope")
}

fn json_ok(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn simulate(dir: &Path, k: usize, n: usize, noise: u8, probs: Option<&Path>) -> Value {
    let (k, n, noise) = (k.to_string(), n.to_string(), noise.to_string());
    let mut args = vec![
        "simulate",
        p(dir),
        "--k",
        &k,
        "--n",
        &n,
        "--side",
        "32",
        "--noise",
        &noise,
        "--seed",
        "3",
    ];
    if let Some(path) = probs {
        args.extend(["--probs", p(path)]);
    }
    json_ok(&args)
}

fn png_count(dir: &Path) -> usize {
    fs::read_dir(dir)
        .unwrap()
        .filter(|e| {
            e.as_ref()
                .unwrap()
                .path()
                .extension()
                .is_some_and(|x| x == "png")
        })
        .count()
}

#[test]
fn simulate_writes_datasets() {
    let tmp = tempfile::tempdir().unwrap();
    let one = tmp.path().join("one");
    let v = simulate(&one, 1, 10, 0, None);
    assert_eq!(v["count"], 10);
    assert_eq!(v["distinct"], 1);
    assert_eq!(png_count(&one), 10);

    let three = tmp.path().join("three");
    let probs = tmp.path().join("p.fvec");
    let v = simulate(&three, 3, 9, 0, Some(&probs));
    assert_eq!(v["distinct"], 3);
    let bytes = fs::read(&probs).unwrap();
    assert_eq!(&bytes[..5], b"FVEC1");
    assert_eq!(bytes.len(), 13 + 4 * 9 * 3);
}

#[test]
fn normalize_verb() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("in");
    simulate(&input, 2, 10, 8, None);
    let out = tmp.path().join("out");
    let v = json_ok(&[
        "normalize",
        p(&input),
        p(&out),
        "--grid",
        "4",
        "--threshold",
        "20",
    ]);
    assert_eq!(v["count"], 10);
    assert_eq!(png_count(&out), 10);

    let v = json_ok(&[
        "normalize",
        p(&input),
        p(&tmp.path().join("o2")),
        "--grid",
        "16",
        "--threshold",
        "50",
    ]);
    assert_eq!(v["count"], 10);

    let missing = run(&["normalize", p(&tmp.path().join("nope")), p(&out)]);
    assert!(!missing.status.success());
    assert!(missing.stdout.is_empty());
    assert!(!missing.stderr.is_empty());
}

#[test]
fn msssim_verb() {
    let tmp = tempfile::tempdir().unwrap();
    let same = tmp.path().join("same");
    simulate(&same, 1, 6, 0, None);
    let v = json_ok(&["msssim", p(&same)]);
    assert_eq!(v["n_pairs"], 670);
    assert!((v["mean"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let varied = tmp.path().join("varied");
    simulate(&varied, 4, 8, 8, None);
    let scores = tmp.path().join("pairs.csv");
    let v = json_ok(&[
        "msssim",
        p(&varied),
        p(&same),
        "--pairs",
        "40",
        "--seed",
        "2",
        "--pair-scores",
        p(&scores),
    ]);
    assert_eq!(v["metric"], "ms-ssim");
    assert_eq!(v["collapsed"], true);
    let text = fs::read_to_string(&scores).unwrap();
    assert!(text.starts_with("pair,i,j,score\n"));
    assert_eq!(text.lines().count(), 41);
}

#[test]
fn fid_verb() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    simulate(&a, 3, 30, 8, None);
    let v = json_ok(&["fid", p(&a), p(&a)]);
    assert!(v["fid"].as_f64().unwrap() <= 1e-6);

    let b = tmp.path().join("b");
    simulate(&b, 1, 30, 8, None);
    assert!(json_ok(&["fid", p(&a), p(&b)])["fid"].as_f64().unwrap() > 0.0);

    let f3 = tmp.path().join("f3.csv");
    let f4 = tmp.path().join("f4.csv");
    fs::write(&f3, "1,2,3\n4,5,6\n7,8,10\n").unwrap();
    fs::write(&f4, "1,2,3,4\n5,6,7,8\n").unwrap();
    let out = run(&["fid", p(&f3), p(&f4), "--features", "file"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains('3') && err.contains('4'), "{err}");
    let v = json_ok(&["fid", p(&f3), p(&f3), "--features", "file"]);
    assert!(v["fid"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn is_verb() {
    let tmp = tempfile::tempdir().unwrap();
    let uniform = tmp.path().join("u.csv");
    fs::write(&uniform, "0.25,0.25,0.25,0.25\n".repeat(20)).unwrap();
    let v = json_ok(&["is", p(&uniform)]);
    assert!((v["mean"].as_f64().unwrap() - 1.0).abs() < 1e-9);

    let onehot = tmp.path().join("o.csv");
    fs::write(&onehot, "1,0\n0,1\n".repeat(10)).unwrap();
    let v = json_ok(&["is", p(&onehot), "--splits", "1"]);
    assert!((v["mean"].as_f64().unwrap() - 2.0).abs() < 1e-9);

    let v = json_ok(&["is", p(&uniform), "--splits", "1", "--real", p(&onehot)]);
    assert_eq!(v["collapse"]["collapsed"], true);
    assert_eq!(v["collapse"]["metric"], "inception-score");

    let bad = tmp.path().join("bad.csv");
    fs::write(&bad, "0.5,0.4\n").unwrap();
    assert!(!run(&["is", p(&bad)]).status.success());
}

fn write_sweep_fixture(root: &Path) -> std::path::PathBuf {
    simulate(&root.join("real"), 5, 10, 8, Some(&root.join("real.csv")));
    simulate(&root.join("s1"), 1, 10, 8, None);
    simulate(&root.join("s2"), 3, 10, 8, None);
    let cfg = root.join("sweep.json");
    fs::write(
        &cfg,
        r#"{
  "window_sizes": [2, 4],
  "thresholds": [0, 20],
  "batch_tags": ["BS20", "BS67"],
  "real_dir": "real",
  "synth_dirs": {"BS20": "s1", "BS67": "s2"},
  "seed": 5,
  "pairs": 12,
  "probs": {"real": "real.csv", "BS20": "real.csv"}
}"#,
    )
    .unwrap();
    cfg
}

#[test]
fn sweep_verb() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_sweep_fixture(tmp.path());
    let out1 = tmp.path().join("o1");
    let v = json_ok(&["sweep", p(&cfg), "--out", p(&out1)]);
    assert_eq!(v["rows"], 2 * 2 * 2 + 2);

    let csv = fs::read_to_string(out1.join("report.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 11);
    assert!(lines[1].starts_with("none,none,BS20,"));
    assert!(lines[2].starts_with("none,none,BS67,"));
    assert!(lines[3].starts_with("2,0,BS20,"));
    assert!(lines[10].starts_with("4,20,BS67,"));
    // IS columns only where a probs entry exists.
    assert!(!lines[1].ends_with(",,,,"));
    assert!(lines[2].ends_with(",,,"));
    assert!(lines[3].ends_with(",,,,"));
    assert!(out1.join("report.json").is_file());
    assert!(fs::read_to_string(out1.join("plotdata.csv"))
        .unwrap()
        .starts_with("metric,batch_tag,series,x,y\n"));

    let out2 = tmp.path().join("o2");
    let rerun = bin()
        .args(["sweep", p(&cfg), "--out", p(&out2)])
        .env("DIVERSCOPE_THREADS", "1")
        .output()
        .unwrap();
    assert!(rerun.status.success());
    assert_eq!(csv, fs::read_to_string(out2.join("report.csv")).unwrap());
}

#[test]
fn sweep_config_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.json");
    fs::write(
        &cfg,
        r#"{"real_dir": ".", "synth_dirs": {}, "treshold": [1]}"#,
    )
    .unwrap();
    let out = run(&["sweep", p(&cfg), "--out", p(&tmp.path().join("o"))]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("treshold"));

    fs::write(
        &cfg,
        r#"{"real_dir": ".", "batch_tags": ["A"], "synth_dirs": {"A": "missing"}}"#,
    )
    .unwrap();
    let out = run(&["sweep", p(&cfg), "--out", p(&tmp.path().join("o"))]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing"));
    assert!(!tmp.path().join("o").exists());
}

#[test]
fn bad_thread_env_is_an_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["simulate", p(&tmp.path().join("x")), "--n", "1"])
        .env("DIVERSCOPE_THREADS", "zero")
        .output()
        .unwrap();
    assert!(!out.status.success());
}
