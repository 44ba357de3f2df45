//! End-to-end tests of the `hybridbm` binary: documented examples, output
//! formats, config precedence, seeds, sidecars and exit codes.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hybridbm"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header: Vec<String> = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse::<f64>().unwrap()).collect())
        .collect();
    (header, rows)
}

fn trapezoid_mass(rows: &[Vec<f64>], xcol: usize, fcol: usize) -> f64 {
    rows.windows(2)
        .map(|w| 0.5 * (w[0][fcol] + w[1][fcol]) * (w[1][xcol] - w[0][xcol]))
        .sum()
}

#[test]
fn density_example_emits_unit_mass_curve() {
    let out = run(&[
        "density", "--family", "nu0", "--sigma1", "1", "--sigma2", "1", "--t", "1", "--xmin",
        "-5", "--xmax", "5", "--n", "501",
    ]);
    assert!(out.status.success());
    let (header, rows) = parse_csv(&stdout(&out));
    assert_eq!(header, ["x", "f"]);
    assert_eq!(rows.len(), 501);
    // the nu = 0 density keeps about 2% of its mass beyond |x| = 5 (the
    // hyperbolic coordinate asinh(5) is only a 2.3-sigma point), so the
    // documented grid captures ~0.979 of the mass; a wider grid closes it
    let mass = trapezoid_mass(&rows, 0, 1);
    assert!((mass - 0.9792).abs() < 0.001, "mass on +-5 = {mass}");
    let wide = run(&[
        "density", "--family", "nu0", "--sigma1", "1", "--sigma2", "1", "--t", "1", "--xmin",
        "-50", "--xmax", "50", "--n", "2001",
    ]);
    let (_, rows) = parse_csv(&stdout(&wide));
    let mass = trapezoid_mass(&rows, 0, 1);
    assert!((0.999..=1.001).contains(&mass), "mass on +-50 = {mass}");
}

#[test]
fn classify_example_reports_nu_and_regime() {
    let out = run(&["classify", "--mu2", "1.5", "--sigma2", "1", "--sigma1", "1"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["nu"], 4.0);
    assert_eq!(v["regime"], "VarianceStable");
}

#[test]
fn validate_core_is_deterministic_and_bit_identical() {
    let a = run(&["validate", "--suite", "core", "--seed", "42"]);
    assert!(a.status.success(), "validate failed: {}", String::from_utf8_lossy(&a.stderr));
    let b = run(&["validate", "--suite", "core", "--seed", "42"]);
    assert_eq!(a.stdout, b.stdout, "reruns must be bit-identical");
    let v: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(v["pass"], true);
    assert!(v["checks"].as_array().unwrap().len() >= 5);
}

#[test]
fn csv_round_trips_through_formatting() {
    let out = run(&[
        "density", "--family", "chameleon", "--sigma1", "1", "--sigma2", "1", "--t", "0.7",
        "--xmin", "-3", "--xmax", "3", "--n", "61",
    ]);
    assert!(out.status.success());
    let (_, rows) = parse_csv(&stdout(&out));
    for row in rows {
        for v in row {
            let rt: f64 = format!("{v:.16e}").parse().unwrap();
            assert_eq!(rt.to_bits(), v.to_bits(), "{v} did not round-trip");
        }
    }
}

#[test]
fn simulate_generates_and_prints_seed_when_missing() {
    let out = run(&["simulate", "--sigma1", "1", "--t", "0.1", "--paths", "10", "--dt", "0.01"]);
    assert!(out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("seed:") && err.contains("generated"), "stderr: {err}");
}

#[test]
fn simulate_with_seed_is_reproducible() {
    let args = [
        "simulate", "--sigma1", "1", "--sigma2", "1", "--nu", "0", "--t", "0.5", "--paths",
        "50", "--dt", "0.01", "--seed", "9",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn config_file_is_used_and_flags_take_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "mu2 = 1.5\nsigma1 = 1\nsigma2 = 1\n").unwrap();
    let out = run(&["classify", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["nu"], 4.0);
    // flag overrides the config value: mu2 = 0 gives nu = 1
    let out = run(&["classify", "--config", cfg.to_str().unwrap(), "--mu2", "0"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["nu"], 1.0);
}

#[test]
fn unknown_config_key_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "sigma1 = 1\nsigma3 = 2\n").unwrap();
    let out = run(&["classify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sigma3"));
}

#[test]
fn nu_and_mu2_are_mutually_exclusive() {
    let out = run(&["classify", "--sigma1", "1", "--sigma2", "1", "--nu", "2", "--mu2", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_file_gets_a_sidecar_log() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.csv");
    let out = run(&[
        "moments", "--sigma1", "1", "--sigma2", "1", "--nu", "2", "--order", "2", "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(path.exists());
    let side = dir.path().join("m.csv.run.json");
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&side).unwrap()).unwrap();
    assert_eq!(v["command"], "moments");
    assert_eq!(v["parameters"]["order"], 2);
}

#[test]
fn figure_overlay_emits_per_time_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig.csv");
    let out = run(&[
        "density", "--family", "nu0", "--sigma1", "1", "--sigma2", "1", "--ts", "0.1,1,5",
        "--xmin", "-4", "--xmax", "4", "--n", "81", "--overlay", "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    for t in ["0.1", "1", "5"] {
        let f = dir.path().join(format!("fig_t{t}.csv"));
        assert!(f.exists(), "missing {}", f.display());
        let (header, rows) = parse_csv(&std::fs::read_to_string(&f).unwrap());
        assert_eq!(header, ["x", "f_hybrid", "f_gaussian"]);
        assert_eq!(rows.len(), 81);
        // peak osculation at x = 0 for the nu = 0 family
        let mid = &rows[40];
        assert_eq!(mid[0], 0.0);
        assert!((mid[1] - mid[2]).abs() < 1e-12 * mid[2]);
    }
}

#[test]
fn var_gaussian_limit_matches_across_models() {
    let hyp = run(&[
        "var", "--u0", "0.05", "--t", "1", "--sigma1", "1", "--sigma2", "1e-8", "--model-kind",
        "hyperbolic",
    ]);
    let gauss = run(&[
        "var", "--u0", "0.05", "--t", "1", "--sigma1", "1", "--model-kind", "gaussian",
    ]);
    let vh: serde_json::Value = serde_json::from_str(&stdout(&hyp)).unwrap();
    let vg: serde_json::Value = serde_json::from_str(&stdout(&gauss)).unwrap();
    let (h, g) = (
        vh["reported_var"].as_f64().unwrap(),
        vg["reported_var"].as_f64().unwrap(),
    );
    assert!(((h - g) / g).abs() < 1e-9, "{h} vs {g}");
}

#[test]
fn microsim_map_only_reports_sde_parameters() {
    let out = run(&[
        "microsim", "--lambda-buy", "2", "--lambda-sell", "1", "--mu-slope", "0.5", "--lot",
        "1", "--omega", "0.5", "--dist", "deterministic:2", "--map-only",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let m = &v["mapped_sde"];
    // mu1 = alpha nbar (lb - ls) = 0.5 * 2 * 1 = 1
    assert_eq!(m["mu1"], 1.0);
    assert_eq!(m["mu2"], 0.5);
}

#[test]
fn unknown_subcommand_and_bad_flag_exit_2() {
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["density", "--family", "nope", "--sigma1", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sidecar_goes_to_stderr_without_out_file() {
    let out = run(&["classify", "--sigma1", "1", "--sigma2", "1", "--nu", "0"]);
    assert!(out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    let v: serde_json::Value = serde_json::from_str(&err).unwrap();
    assert_eq!(v["command"], "classify");
    assert!(Path::new(&env!("CARGO_BIN_EXE_hybridbm")).exists());
}
