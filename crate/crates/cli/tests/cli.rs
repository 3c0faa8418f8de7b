//! End-to-end checks of the command-line surface: flag handling, CSV and
//! sidecar formats, exit codes, determinism.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dlcorr"))
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dlcorr-cli-tests-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn assert_code(out: &Output, code: i32) {
    assert_eq!(
        out.status.code(),
        Some(code),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn constants_deterministic_and_correct() {
    let out_a = tmp("constants_a.csv");
    let out_b = tmp("constants_b.csv");
    for (path, threads) in [(&out_a, "1"), (&out_b, "2")] {
        let out = run(&[
            "constants",
            "--h-list", "2,3,6",
            "--k-list", "1,3",
            "--prime-cutoff", "1000000",
            "--series-cutoff", "20000",
            "--threads", threads,
            "--out", path.to_str().unwrap(),
        ]);
        assert_code(&out, 0);
    }
    let a = fs::read(&out_a).unwrap();
    let b = fs::read(&out_b).unwrap();
    assert_eq!(a, b, "CSV must not depend on the thread count");

    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "h,k,alpha,alpha_series,beta,alpha_ap,s_factor");
    assert_eq!(text.lines().count(), 7, "header + 6 rows");
    // α(2) = 2C₂ in the h=2, k=1 row
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(&row[..2], &["2", "1"]);
    let alpha: f64 = row[2].parse().unwrap();
    assert!((alpha - 1.3203236).abs() < 1e-5, "2C2 = {alpha}");
    // odd offset: α = 0
    let row3: Vec<&str> = text
        .lines()
        .find(|l| l.starts_with("3,1,"))
        .unwrap()
        .split(',')
        .collect();
    assert_eq!(row3[2].parse::<f64>().unwrap(), 0.0);
    // sidecar exists and echoes the config
    let meta = fs::read_to_string(tmp("constants_a.csv.meta.json")).unwrap();
    assert!(meta.contains("\"command\": \"constants\""));
    assert!(meta.contains("\"series_cutoff\": 20000"));
}

#[test]
fn constants_empty_offset_list_gives_header_only() {
    let out_path = tmp("constants_empty.csv");
    let out = run(&[
        "constants",
        "--h-list", "",
        "--k-list", "1,3",
        "--prime-cutoff", "100000",
        "--series-cutoff", "1000",
        "--out", out_path.to_str().unwrap(),
    ]);
    assert_code(&out, 0);
    let text = fs::read_to_string(&out_path).unwrap();
    assert_eq!(text.trim(), "h,k,alpha,alpha_series,beta,alpha_ap,s_factor");
}

#[test]
fn constants_invalid_offsets_listed_not_fatal() {
    let out_path = tmp("constants_h0.csv");
    let out = run(&[
        "constants",
        "--h-list", "0,2",
        "--k-list", "1",
        "--prime-cutoff", "100000",
        "--series-cutoff", "1000",
        "--out", out_path.to_str().unwrap(),
    ]);
    assert_code(&out, 0);
    let text = fs::read_to_string(&out_path).unwrap();
    assert_eq!(text.lines().count(), 2, "h = 0 row skipped, h = 2 kept");
    let meta = fs::read_to_string(tmp("constants_h0.csv.meta.json")).unwrap();
    assert!(meta.contains("h=0 k=1"), "sidecar lists the invalid combo: {meta}");
}

#[test]
fn hl_verify_rows_and_error_rows() {
    let out_path = tmp("hl.csv");
    let out = run(&[
        "hl-verify",
        "--offset", "2",
        "--modulus", "3",
        "--length", "100000",
        "--out", out_path.to_str().unwrap(),
    ]);
    assert_code(&out, 0);
    let text = fs::read_to_string(&out_path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "h,k,r,N,lambda_mean,pi2,predicted,rel_err");
    // only r = 2 is admissible for (h, k) = (2, 3)
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("2,3,2,100000,"));

    // an explicitly requested bad residue becomes an error row, not a failure
    let out2_path = tmp("hl_bad.csv");
    let out2 = run(&[
        "hl-verify",
        "--offset", "2",
        "--modulus", "3",
        "--length", "1000",
        "--residue", "1",
        "--out", out2_path.to_str().unwrap(),
    ]);
    assert_code(&out2, 0);
    let text2 = fs::read_to_string(&out2_path).unwrap();
    assert!(text2.lines().nth(1).unwrap().contains("nan"));
    let meta = fs::read_to_string(tmp("hl_bad.csv.meta.json")).unwrap();
    assert!(meta.contains("not coprime"), "sidecar lists the obstruction: {meta}");
}

#[test]
fn r2_eval_raw_grid_and_zero_rejection() {
    let out_path = tmp("r2.csv");
    let out = run(&[
        "r2-eval",
        "--height", "1e6",
        "--modulus", "3",
        "--eps-min", "0.1",
        "--eps-max", "0.5",
        "--eps-steps", "5",
        "--components", "total,diag,off",
        "--prime-cutoff", "10000",
        "--out", out_path.to_str().unwrap(),
    ]);
    assert_code(&out, 0);
    let text = fs::read_to_string(&out_path).unwrap();
    assert_eq!(text.lines().next().unwrap(), "eps,x_unfolded,value,component,E,k");
    assert_eq!(text.lines().count(), 1 + 3 * 5);
    for line in text.lines().skip(1) {
        let v: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        assert!(v.is_finite());
    }

    // a grid containing ε = 0 is rejected for singular components
    let out2 = run(&[
        "r2-eval",
        "--height", "1e6",
        "--modulus", "3",
        "--eps-min", "-0.1",
        "--eps-max", "0.1",
        "--eps-steps", "3",
        "--components", "diag",
        "--prime-cutoff", "10000",
        "--out", tmp("r2_zero.csv").to_str().unwrap(),
    ]);
    assert_code(&out2, 2);
}

#[test]
fn r2_eval_unfolded_appends_gue_reference() {
    let out_path = tmp("r2_unfolded.csv");
    let out = run(&[
        "r2-eval",
        "--height", "1e8",
        "--modulus", "4",
        "--x-min", "0.5",
        "--x-max", "2.0",
        "--x-steps", "4",
        "--components", "total",
        "--prime-cutoff", "10000",
        "--out", out_path.to_str().unwrap(),
    ]);
    assert_code(&out, 0);
    let text = fs::read_to_string(&out_path).unwrap();
    assert!(text.contains(",gue_reference,"));
    assert!(text.contains(",total,"));
    // unfolded totals land near the GUE reference at this height
    let mut totals = vec![];
    let mut gues = vec![];
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let v: f64 = f[2].parse().unwrap();
        match f[3] {
            "total" => totals.push(v),
            "gue_reference" => gues.push(v),
            other => panic!("unexpected component {other}"),
        }
    }
    for (t, g) in totals.iter().zip(&gues) {
        assert!((t - g).abs() < 0.05, "unfolded total {t} vs GUE {g}");
    }
}

#[test]
fn zeros_scan_writes_list_and_census_holds() {
    let out_path = tmp("zeros4.txt");
    let out = run(&[
        "zeros",
        "--modulus", "4",
        "--label", "1",
        "--t-min", "0",
        "--t-max", "60",
        "--tol", "1e-9",
        "--out", out_path.to_str().unwrap(),
    ]);
    assert_code(&out, 0);
    let text = fs::read_to_string(&out_path).unwrap();
    assert!(text.starts_with("# modulus = 4\n"));
    assert!(text.contains("# conductor = 4"));
    let zeros: Vec<f64> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.parse().unwrap())
        .collect();
    // integrated density at T = 60 for k = 4
    let expected = 60.0 / std::f64::consts::TAU * ((4.0 * 60.0 / std::f64::consts::TAU).ln() - 1.0);
    assert!((zeros.len() as f64 - expected).abs() <= 3.0, "{} vs {expected}", zeros.len());
    assert!(zeros.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn zeros_rejects_non_primitive_naming_conductor() {
    // the character mod 8 with label (1,1) is induced from modulus 4
    let out = run(&[
        "zeros",
        "--modulus", "8",
        "--label", "1,1",
        "--t-max", "50",
        "--out", tmp("zeros8.txt").to_str().unwrap(),
    ]);
    assert_code(&out, 2);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("conductor 4"), "stderr: {stderr}");
}

#[test]
fn compare_poisson_surrogate_deviates_from_gue() {
    let out_path = tmp("cmp_poisson.csv");
    let out = run(&[
        "compare",
        "--surrogate", "poisson",
        "--modulus", "3",
        "--t-min", "50",
        "--t-max", "4000",
        "--seed", "7",
        "--bin-width", "0.25",
        "--max-x", "3",
        "--prime-cutoff", "10000",
        "--out", out_path.to_str().unwrap(),
    ]);
    assert_code(&out, 0);
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp("cmp_poisson.csv.summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["gue_consistent"], serde_json::Value::Bool(false));
    let first = summary["first_bin_density"].as_f64().unwrap();
    assert!(first > 0.5, "Poisson shows no level repulsion: {first}");
    let text = fs::read_to_string(&out_path).unwrap();
    assert_eq!(text.lines().next().unwrap(), "x_bin,density,stderr,predicted,z_score");
}

#[test]
fn compare_real_zeros_end_to_end() {
    // the flagship pipeline: scan ~1000 genuine zeros, then compare their
    // pair statistics against the formula
    let zeros_path = tmp("zeros_k3_real.txt");
    let out = run(&[
        "zeros",
        "--modulus", "3",
        "--label", "1",
        "--t-min", "0",
        "--t-max", "1205",
        "--tol", "1e-7",
        "--out", zeros_path.to_str().unwrap(),
    ]);
    assert_code(&out, 0);

    let cmp_path = tmp("cmp_real.csv");
    let out = run(&[
        "compare",
        "--zero-file", zeros_path.to_str().unwrap(),
        "--bin-width", "0.25",
        "--max-x", "3",
        "--prime-cutoff", "20000",
        "--out", cmp_path.to_str().unwrap(),
    ]);
    assert_code(&out, 0);
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp("cmp_real.csv.summary.json")).unwrap())
            .unwrap();
    assert!(summary["n_zeros"].as_u64().unwrap() >= 1000);
    let mad = summary["mean_abs_deviation"].as_f64().unwrap();
    let first = summary["first_bin_density"].as_f64().unwrap();
    // ~1000 zeros leave ~6% noise per bin; the point is the level repulsion
    // and the broad agreement, not criterion-grade accuracy
    assert!(mad < 0.12, "mean abs deviation {mad}");
    assert!(first < 0.15, "first-bin density {first}");
}

#[test]
fn compare_rejects_modulus_mismatch_and_short_lists() {
    // build a small zero list first
    let zeros_path = tmp("zeros_for_compare.txt");
    let out = run(&[
        "zeros",
        "--modulus", "4",
        "--label", "1",
        "--t-max", "60",
        "--out", zeros_path.to_str().unwrap(),
    ]);
    assert_code(&out, 0);

    let mismatch = run(&[
        "compare",
        "--zero-file", zeros_path.to_str().unwrap(),
        "--modulus", "3",
        "--out", tmp("cmp_mismatch.csv").to_str().unwrap(),
    ]);
    assert_code(&mismatch, 2);
    assert!(String::from_utf8_lossy(&mismatch.stderr).contains("does not match"));

    // ~17 zeros is far below the estimator's minimum
    let short = run(&[
        "compare",
        "--zero-file", zeros_path.to_str().unwrap(),
        "--out", tmp("cmp_short.csv").to_str().unwrap(),
    ]);
    assert_code(&short, 2);
    assert!(String::from_utf8_lossy(&short.stderr).contains("at least"));
}
