//! End-to-end checks of the command-line interface: exit codes, output
//! determinism, and the frozen CSV schema.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sobolev-lab"))
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sobolev-lab-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

const SMALL_LAMBDA_CONFIG: &str = "\
experiment = small-lambda
seed = 11
samples = 10000
n = 1
p = 1
body.shape = box
body.half_widths = 1
fn.kind = indicator
fn.center = 0.5
fn.region.shape = box
fn.region.half_widths = 0.5
lambda.list = 0.5, 0.1, 0.01, 0.004
";

#[test]
fn run_is_deterministic_and_exits_zero() {
    let dir = temp_dir("run");
    let cfg = dir.join("exp.cfg");
    std::fs::write(&cfg, SMALL_LAMBDA_CONFIG).unwrap();
    let out_a = dir.join("a.csv");
    let out_b = dir.join("b.csv");
    for out in [&out_a, &out_b] {
        let status = bin()
            .args(["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
    }
    let a = std::fs::read(&out_a).unwrap();
    let b = std::fs::read(&out_b).unwrap();
    assert_eq!(a, b, "repeated runs must be byte-identical");
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("param,value,stderr,reference,rel_error\n"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn csv_matches_golden_file() {
    let dir = temp_dir("golden");
    let cfg = dir.join("exp.cfg");
    std::fs::write(&cfg, SMALL_LAMBDA_CONFIG).unwrap();
    let out = dir.join("out.csv");
    let status = bin()
        .args(["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let produced = std::fs::read_to_string(&out).unwrap();
    let golden = include_str!("golden/small_lambda.csv");
    assert_eq!(produced, golden, "CSV schema or RNG stream drifted");
}

#[test]
fn json_contains_version_and_zero_runtime() {
    let dir = temp_dir("json");
    let cfg = dir.join("exp.cfg");
    std::fs::write(&cfg, SMALL_LAMBDA_CONFIG).unwrap();
    let out = dir.join("out.json");
    let status = bin()
        .args([
            "run",
            cfg.to_str().unwrap(),
            "--format",
            "json",
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let value: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(value["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(value["runtime_ms"], 0);
    assert_eq!(value["verdict"], "pass");
    assert!(value["rows"].as_array().unwrap().len() == 4);
    assert!(value["references"].as_array().is_some());
}

#[test]
fn plot_data_writes_sidecar() {
    let dir = temp_dir("plot");
    let cfg = dir.join("exp.cfg");
    std::fs::write(&cfg, SMALL_LAMBDA_CONFIG).unwrap();
    let out = dir.join("curve.dat");
    let status = bin()
        .args([
            "run",
            cfg.to_str().unwrap(),
            "--format",
            "plot-data",
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let main = std::fs::read_to_string(&out).unwrap();
    let sidecar = std::fs::read_to_string(dir.join("curve.dat.ref")).unwrap();
    assert_eq!(main.lines().count(), 4);
    assert_eq!(sidecar.lines().count(), 4);
    for line in main.lines() {
        assert_eq!(line.split_whitespace().count(), 2);
    }
}

#[test]
fn config_errors_exit_one() {
    let dir = temp_dir("badcfg");
    let cfg = dir.join("bad.cfg");
    std::fs::write(&cfg, "experiment = ms\nseed = 1\np = 0.5\n").unwrap();
    let output = bin().args(["run", cfg.to_str().unwrap()]).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("line 3"), "stderr: {stderr}");
    assert!(stderr.contains("p >= 1"), "stderr: {stderr}");
}

#[test]
fn usage_errors_exit_one() {
    let output = bin().args(["frobnicate"]).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
    let output = bin().args(["verify", "nonsense"]).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn failing_verdict_exits_two() {
    // A sweep whose largest thresholds sit far from the limit.
    let dir = temp_dir("fail");
    let cfg = dir.join("fail.cfg");
    std::fs::write(
        &cfg,
        "experiment = small-lambda\nseed = 2\nsamples = 8000\nn = 1\np = 1\nbody.shape = box\nbody.half_widths = 1\nfn.kind = indicator\nfn.center = 0.5\nfn.region.shape = box\nfn.region.half_widths = 0.5\nlambda.list = 100, 10, 1\n",
    )
    .unwrap();
    let output = bin().args(["run", cfg.to_str().unwrap()]).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn verify_prop21_passes() {
    let dir = temp_dir("verify");
    let out = dir.join("prop21.csv");
    let status = bin()
        .args(["verify", "prop21", "--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 4); // header + three gamma rows
}

#[test]
fn verify_claims_and_prop22_pass_at_small_budgets() {
    let out = bin()
        .args(["verify", "claims", "--samples", "3000", "--seed", "5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let out = bin()
        .args(["verify", "prop22", "--samples", "400", "--seed", "6"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let out = bin()
        .args(["verify", "bp", "--samples", "8000", "--seed", "7"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn threads_do_not_change_results() {
    let dir = temp_dir("threads");
    let cfg = dir.join("exp.cfg");
    std::fs::write(&cfg, SMALL_LAMBDA_CONFIG).unwrap();
    let one = dir.join("one.csv");
    let four = dir.join("four.csv");
    for (out, threads) in [(&one, "1"), (&four, "4")] {
        let status = bin()
            .args([
                "run",
                cfg.to_str().unwrap(),
                "--threads",
                threads,
                "--out",
                out.to_str().unwrap(),
            ])
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
    }
    assert_eq!(
        std::fs::read(&one).unwrap(),
        std::fs::read(&four).unwrap(),
        "thread count leaked into results"
    );
}
