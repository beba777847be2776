mod common;

use std::process::Command;

use projdesign::experiments::{run_experiment, ExperimentConfig, RunOptions, CSV_HEADER};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_projdesign"))
}

fn stdout(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn bessel_roots_prints_ascending_times() {
    let (code, out, _) = stdout(&["bessel-roots", "--count", "3"]);
    assert_eq!(code, 0);
    let ts: Vec<f64> = out.lines().map(|l| l.parse().unwrap()).collect();
    assert_eq!(ts.len(), 3);
    assert!((ts[0] - 1.91585).abs() < 1e-5);
    assert!(ts.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn haar_stats_prints_mu_k() {
    let (code, out, _) = stdout(&["haar-stats", "--na", "1", "--nb", "1", "--k", "2"]);
    assert_eq!(code, 0);
    let mu: f64 = out
        .lines()
        .find_map(|l| l.strip_prefix("mu_k\t"))
        .unwrap()
        .parse()
        .unwrap();
    assert!((mu - 0.3).abs() < 1e-15);
}

#[test]
fn wg_table_csv() {
    let (code, out, _) = stdout(&["wg-table", "--q", "2", "--n", "4"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "q,N,cycle_type,value");
    let v: f64 = lines[1].strip_prefix("2,4,2,").unwrap().parse().unwrap();
    assert!((v + 1.0 / 60.0).abs() < 1e-15);
    let v: f64 = lines[2].strip_prefix("2,4,1+1,").unwrap().parse().unwrap();
    assert!((v - 1.0 / 15.0).abs() < 1e-15);
}

#[test]
fn report_bell_pairs() {
    let (code, out, _) = stdout(&["report", "--na", "1", "--nb", "1", "--k", "2", "--state", "bell"]);
    assert_eq!(code, 0);
    assert!(out.contains("f_haar\t0.33333333333333331"));
}

#[test]
fn validation_errors_exit_one_with_single_line() {
    let (code, _, err) = stdout(&["run", "--config", "missing.cfg"]);
    assert_eq!(code, 1);
    assert!(err.contains("missing.cfg"));
    assert_eq!(err.trim_end().lines().count(), 1);

    let (code, _, err) = stdout(&["wg-table", "--q", "3", "--n", "2"]);
    assert_eq!(code, 1);
    assert_eq!(err.trim_end().lines().count(), 1);

    let (code, _, err) = stdout(&["bessel-roots"]);
    assert_eq!(code, 1);
    assert_eq!(err.trim_end().lines().count(), 1);

    let dir = common::tempdir();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(
        &cfg,
        "experiment = \"E3_2k_to_k\"\ntrials = 2\nseed = 1\ncolour = 3\n[grid]\nn_a = [1]\nn_b = [2]\nk = [1]\n",
    )
    .unwrap();
    let (code, _, err) = stdout(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("colour"), "{err}");

    std::fs::write(
        &cfg,
        "experiment = \"E1_bessel_roots\"\ntrials = 2\nseed = 1\n[grid]\nn_a = [1]\nn_b = [20]\nk = [1]\nt = [1.0]\n",
    )
    .unwrap();
    let (code, _, err) = stdout(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("n_b=20"), "{err}");
    assert_eq!(err.trim_end().lines().count(), 1);
}

#[test]
fn run_matches_library_call_and_respects_overrides() {
    let dir = common::tempdir();
    let cfg_path = dir.path().join("e3.toml");
    let text = "experiment = \"E3_2k_to_k\"\ntrials = 3\nseed = 1\noutput_dir = \"ignored\"\n[grid]\ndims = [[1, 2], [1, 3]]\nk = [1, 2]\n";
    std::fs::write(&cfg_path, text).unwrap();
    let out_dir = dir.path().join("out");
    let status = bin()
        .args(["run", "--config", cfg_path.to_str().unwrap(), "--out", out_dir.to_str().unwrap()])
        .args(["--seed", "77", "--threads", "2", "--quiet"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let csv = std::fs::read_to_string(out_dir.join("results.csv")).unwrap();
    assert!(csv.starts_with(CSV_HEADER));
    assert_eq!(csv.lines().count(), 1 + 3 * 4);
    assert!(csv.lines().skip(1).all(|l| l.split(',').nth(2) == Some("77")));

    let mut cfg = ExperimentConfig::from_toml_str(text).unwrap();
    cfg.seed = 77;
    let lib = run_experiment(&cfg, &RunOptions { threads: 1, quiet: true }).unwrap();
    assert_eq!(lib.csv(), csv);

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 77);
    assert_eq!(manifest["config_sha256"].as_str().unwrap().len(), 64);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["points"].as_array().unwrap().len(), 4);
    assert_eq!(summary["run_failed"], false);
}
