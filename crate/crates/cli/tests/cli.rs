use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn lpnf(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lpnf")).args(args).current_dir(cwd).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, v: &Value) -> String {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p.to_string_lossy().into_owned()
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

/// One oscillator pair `S = z∂z - w∂w` with user coefficients and perturbation.
fn one_pair(a: Value, perturbation: Value, base: [f64; 2], gamma: f64) -> Value {
    json!({
        "version": 1,
        "name": "pair",
        "dims": {"n": 2, "p": 1, "l": 1},
        "morphism": {"integer": [[1, -1]]},
        "a": a,
        "perturbation": perturbation,
        "schedule": {"omega": {"kind": "constant"}, "gamma": gamma},
        "normalize": {"order": 8, "base": [base]},
        "grid": {"rect": [[[-1.0, 1.0], [-1.0, 1.0]]], "h": 0.02, "k_max": 1},
        "verify": {"rho": 0.1, "t_end": 1.0, "samples": 4, "oracle": false},
        "measure": {"eps_star": 0.5}
    })
}

fn quintic() -> Value {
    // Symplectic gradient of h = (zw)²(z+w)/4 · 1e-3 with c = -2i.
    json!([
        {"i": 0, "x": [3, 1], "c": [0.0, -1.0e-3]},
        {"i": 0, "x": [2, 2], "c": [0.0, -1.5e-3]},
        {"i": 1, "x": [2, 2], "c": [0.0, 1.5e-3]},
        {"i": 1, "x": [1, 3], "c": [0.0, 1.0e-3]}
    ])
}

#[test]
fn scenario_files_roundtrip_through_resonances() {
    let dir = tempfile::tempdir().unwrap();
    let out = lpnf(&["scenario", "--out", "sc"], dir.path());
    assert!(out.status.success());
    let r = lpnf(&["resonances", "sc/hamiltonian.json", "--out", "rh"], dir.path());
    assert_eq!(r.status.code(), Some(0));
    assert_eq!(report(&dir.path().join("rh"))["generators"], json!([[1, 1]]));
    let r = lpnf(&["resonances", "sc/volume.json", "--out", "rv"], dir.path());
    assert_eq!(r.status.code(), Some(0));
    assert_eq!(report(&dir.path().join("rv"))["generators"], json!([[1, 1, 1]]));
}

#[test]
fn schema_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let mut bad = one_pair(json!([[{"u": [0], "c": [1.0, 0.0]}]]), json!([]), [0.0, 0.0], 0.1);
    bad["morphism"] = json!({"integer": [[1, -1], [1, 1]]});
    let f = write(dir.path(), "bad.json", &bad);
    assert_eq!(lpnf(&["resonances", &f], dir.path()).status.code(), Some(2));
    let mut unknown = one_pair(json!([[{"u": [0], "c": [1.0, 0.0]}]]), json!([]), [0.0, 0.0], 0.1);
    unknown["colour"] = json!("blue");
    let f = write(dir.path(), "unknown.json", &unknown);
    assert_eq!(lpnf(&["resonances", &f], dir.path()).status.code(), Some(2));
    let mut version = one_pair(json!([[{"u": [0], "c": [1.0, 0.0]}]]), json!([]), [0.0, 0.0], 0.1);
    version["version"] = json!(7);
    let f = write(dir.path(), "version.json", &version);
    assert_eq!(lpnf(&["normalize", &f], dir.path()).status.code(), Some(2));
    let mut float = one_pair(json!([[{"u": [0], "c": [1.0, 0.0]}]]), json!([]), [0.0, 0.0], 0.1);
    float["morphism"] = json!({"float": [[[1.0, 0.0], [-1.0, 0.0]]]});
    let f = write(dir.path(), "float.json", &float);
    assert_eq!(lpnf(&["resonances", &f, "--exact-resonance"], dir.path()).status.code(), Some(2));
    assert_eq!(lpnf(&["resonances", &f, "--out", "fl"], dir.path()).status.code(), Some(0));
}

#[test]
fn trivial_ring_exit_three_unless_allowed() {
    let dir = tempfile::tempdir().unwrap();
    let mut pf = one_pair(json!([[]]), json!([]), [0.0, 0.0], 0.1);
    pf["morphism"] = json!({"integer": [[1, 1]]});
    pf["dims"]["p"] = json!(1);
    let f = write(dir.path(), "trivial.json", &pf);
    assert_eq!(lpnf(&["resonances", &f], dir.path()).status.code(), Some(3));
    let ok = lpnf(&["resonances", &f, "--allow-trivial-ring", "--out", "t"], dir.path());
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(report(&dir.path().join("t"))["p"], json!(0));
}

#[test]
fn normalize_is_deterministic_and_small() {
    let dir = tempfile::tempdir().unwrap();
    assert!(lpnf(&["scenario", "--out", "sc"], dir.path()).status.success());
    for out in ["n1", "n2"] {
        let r = lpnf(&["normalize", "sc/hamiltonian.json", "--out", out], dir.path());
        assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    }
    let a = std::fs::read(dir.path().join("n1/report.json")).unwrap();
    let b = std::fs::read(dir.path().join("n2/report.json")).unwrap();
    assert_eq!(a, b);
    assert!(dir.path().join("n1/state.series.json").exists());
    assert!(dir.path().join("n1/stages/steps.csv").exists());
    assert!(dir.path().join("n1/run.json").exists());
    let rep = report(&dir.path().join("n1"));
    assert_eq!(rep["m_final"], json!(16));
    for step in rep["steps"].as_array().unwrap() {
        assert!(step["record"]["low_degree_residual"].as_f64().unwrap() <= 1e-9);
        assert_eq!(step["good_perturbation"], json!(true));
    }
    assert!(rep["conjugacy"]["residual"].as_f64().unwrap() <= 1e-9);
    for key in ["c1", "lambda_max", "l_inv_norm"] {
        assert!(rep["constants"][key].is_number());
    }
}

#[test]
fn unperturbed_normalization_has_identity_steps() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "p.json", &one_pair(json!([[{"u": [0], "c": [0.0, -2.0]}]]), json!([]), [0.01, 0.0], 0.1));
    let r = lpnf(&["normalize", &f, "--out", "o"], dir.path());
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let rep = report(&dir.path().join("o"));
    for step in rep["steps"].as_array().unwrap() {
        assert_eq!(step["record"]["generator_max"], json!(0.0));
    }
}

#[test]
fn vanishing_divisor_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "p.json", &one_pair(json!([[{"u": [1], "c": [1.0, 0.0]}]]), quintic(), [0.0, 0.0], 0.1));
    let r = lpnf(&["normalize", &f, "--out", "o"], dir.path());
    assert_eq!(r.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&r.stderr).contains("base b"));
    let r = lpnf(&["normalize", &f, "--base", "0.5,0", "--out", "o2"], dir.path());
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
}

#[test]
fn resonant_part_outside_span_exits_five() {
    let dir = tempfile::tempdir().unwrap();
    let pf = json!({
        "version": 1,
        "name": "not-good",
        "dims": {"n": 3, "p": 2, "l": 1},
        "morphism": {"integer": [[1, -1, 0]]},
        "resonant_rows": [[1, 1, 0], [0, 0, 1]],
        "a": [[{"u": [0, 0], "c": [1.0, 0.0]}]],
        "perturbation": [{"i": 2, "x": [1, 1, 1], "c": [1.0, 0.0]}],
        "schedule": {"omega": {"kind": "constant"}, "gamma": 0.1},
        "normalize": {"order": 4, "base": [[0.1, 0.0], [0.1, 0.0]]}
    });
    let f = write(dir.path(), "p.json", &pf);
    assert_eq!(lpnf(&["normalize", &f, "--out", "o"], dir.path()).status.code(), Some(5));
}

#[test]
fn filter_survival_fractions() {
    let dir = tempfile::tempdir().unwrap();
    let zero = write(dir.path(), "z.json", &one_pair(json!([[{"u": [1], "c": [1.0, 0.0]}]]), json!([]), [0.0, 0.0], 0.0));
    assert_eq!(lpnf(&["filter", &zero, "--out", "fz"], dir.path()).status.code(), Some(0));
    assert_eq!(report(&dir.path().join("fz"))["survival_fraction"], json!(1.0));
    let disc = write(dir.path(), "d.json", &one_pair(json!([[{"u": [1], "c": [1.0, 0.0]}]]), json!([]), [0.0, 0.0], 0.2));
    let r = lpnf(&["filter", &disc, "--out", "fd", "--grid-h", "0.01", "--kmax", "2"], dir.path());
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let rep = report(&dir.path().join("fd"));
    let expected = 1.0 - std::f64::consts::PI * 0.04 / 4.0;
    assert!((rep["survival_fraction"].as_f64().unwrap() - expected).abs() < 2.0 * 0.01);
    assert!(dir.path().join("fd/stages/stage_2.csv").exists());
}

#[test]
fn measure_reports_both_estimates() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "m.json", &one_pair(json!([[{"u": [1], "c": [1.0, 0.0]}]]), json!([]), [0.0, 0.0], 0.05));
    let r = lpnf(&["measure", &f, "--out", "m", "--grid-h", "0.05"], dir.path());
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let rep = report(&dir.path().join("m"));
    assert!(rep["empirical_excluded_measure"].as_f64().unwrap() >= 0.0);
    assert!(rep["analytic_excluded_bound"].is_number());
    assert_eq!(rep["nondegeneracy"]["mu0"].as_u64(), Some(0));
    assert_eq!(rep["mu0_used"].as_u64(), Some(1));
}

#[test]
fn verify_unperturbed_drift_is_integrator_noise() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "p.json", &one_pair(json!([[{"u": [0], "c": [0.0, -2.0]}]]), json!([]), [0.01, 0.0], 0.1));
    let r = lpnf(&["verify", &f, "--out", "v"], dir.path());
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let rep = report(&dir.path().join("v"));
    assert!(rep["invariance"]["straightened"].as_f64().unwrap() <= 1e-10);
    assert!(rep["invariance"]["unnormalized"].as_f64().unwrap() <= 1e-10);
}
