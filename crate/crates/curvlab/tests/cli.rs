use std::path::Path;
use std::process::{Command, Output};

use curvlab::csvio::Table;
use curvlab::snapshot::Snapshot;

fn curvlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_curvlab")).args(args).env("CURVLAB_THREADS", "1").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn read_table(path: &Path) -> Table {
    Table::read_from(std::fs::File::open(path).unwrap()).unwrap()
}

#[test]
fn twodim_example_reports_closed_form_and_quadrature() {
    let o = curvlab(&["example", "--family", "twodim", "--i", "3", "--samples", "11"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["schema_version"], 1);
    let closed = v["closed_form_total"].as_f64().unwrap();
    assert!((closed - 16.084954).abs() < 1e-6, "{closed}");
    // the quadrature of -Δu over the plane is zero, and the report says so
    assert!(v["total"].as_f64().unwrap().abs() < 1e-9);
    assert!(!v["notes"].as_array().unwrap().is_empty());
    assert_eq!(v["samples"].as_array().unwrap().len(), 11);
    assert_eq!(v["family"]["n"], 2);
}

#[test]
fn c10_example_exceeds_bound() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("r.svg");
    let out = dir.path().join("r.json");
    let o = curvlab(&[
        "example", "--family", "c10", "--n", "3", "--i", "50", "--r0", "1",
        "--out", out.to_str().unwrap(), "--svg", svg.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let total = v["total"].as_f64().unwrap();
    assert!(total >= 20.106, "{total}");
    assert!((v["lower_bound"].as_f64().unwrap() - 32.0 * std::f64::consts::PI / 5.0).abs() < 1e-12);
    assert!(v["error_estimate"].as_f64().unwrap() < 1e-6);
    assert!(std::fs::read_to_string(&svg).unwrap().contains("<polyline"));
}

#[test]
fn powerlaw_family_in_two_dimensions_is_rejected() {
    let o = curvlab(&["example", "--family", "c10", "--n", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("n >= 3"), "{}", stderr(&o));
}

#[test]
fn unknown_family_and_bad_flags_are_validation_errors() {
    assert_eq!(curvlab(&["example", "--family", "nope"]).status.code(), Some(2));
    assert_eq!(curvlab(&["example"]).status.code(), Some(2));
    assert_eq!(curvlab(&["example", "--family", "c10", "--i", "-1"]).status.code(), Some(2));
    assert_eq!(curvlab(&["example", "--family", "c10", "--bogus"]).status.code(), Some(2));
    assert_eq!(curvlab(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn quadrature_budget_exhaustion_is_numerical() {
    let o = curvlab(&["example", "--family", "c21", "--i", "400", "--max-evals", "30", "--abs-tol", "1e-14"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn help_succeeds() {
    let o = curvlab(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    for cmd in ["example", "sweep", "flow", "integrals", "verify"] {
        assert!(stdout(&o).contains(cmd));
    }
}

#[test]
fn c10_sweep_columns_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    let js = dir.path().join("s.json");
    let o = curvlab(&[
        "sweep", "--family", "c10", "--i-list", "10,40,160", "--p", "4,8", "--samples", "5000",
        "--csv", csv.to_str().unwrap(), "--json", js.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&csv).unwrap();
    let t = read_table(&csv);
    assert_eq!(t.header, ["i", "total", "total_error", "c0", "c1", "c2", "w1p@4", "w1p@8", "bound", "verdict"]);
    let c0 = t.numbers("c0").unwrap();
    assert!(c0[0] > c0[1] && c0[1] > c0[2], "{c0:?}");
    // the artifact's reader and writer reproduce the file exactly
    assert_eq!(t.to_csv_string(), text);
    let s: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&js).unwrap()).unwrap();
    assert_eq!(s["trends"]["c0"]["verdict"], "vanishing");
    assert_eq!(s["trends"]["c1"]["verdict"], "bounded-below");
}

#[test]
fn c21_sweep_c1_decreases_c2_does_not_vanish() {
    let o = curvlab(&["sweep", "--family", "c21", "--i-list", "10,40,160", "--samples", "5000"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let t = Table::read_from(o.stdout.as_slice()).unwrap();
    let c1 = t.numbers("c1").unwrap();
    assert!(c1.windows(2).all(|w| w[1] < w[0]), "{c1:?}");
    let c2 = t.numbers("c2").unwrap();
    assert!(c2.iter().all(|&v| v > 1.0), "{c2:?}");
}

#[test]
fn sweep_needs_two_points() {
    assert_eq!(curvlab(&["sweep", "--family", "c10", "--i-list", ""]).status.code(), Some(2));
    assert_eq!(curvlab(&["sweep", "--family", "c10", "--i-list", "10"]).status.code(), Some(2));
    assert_eq!(curvlab(&["sweep", "--family", "c10"]).status.code(), Some(2));
    let o = curvlab(&["sweep", "--family", "c10", "--i-list", "10,20", "--samples", "500"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn geometric_sweep_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "# C10 sweep\nfamily = c10\ni_start = 10\ni-ratio = 2 # doubling\ni-max = 40\nsamples = 500\n").unwrap();
    let o = curvlab(&["--config", cfg.to_str().unwrap(), "sweep", "--i-max", "80"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let t = Table::read_from(o.stdout.as_slice()).unwrap();
    // the flag overrides the file
    assert_eq!(t.numbers("i").unwrap(), vec![10.0, 20.0, 40.0, 80.0]);
    std::fs::write(&cfg, "family = c10\ncolour = red\n").unwrap();
    assert_eq!(curvlab(&["--config", cfg.to_str().unwrap(), "example"]).status.code(), Some(2));
}

#[test]
fn two_dimensional_conformal_flow_conserves_gauss_bonnet() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("f.csv");
    let snap = dir.path().join("f.bin");
    let o = curvlab(&[
        "flow", "--kind", "conformal2d", "--res", "32", "--amplitude", "0.1", "--t-end", "0.01", "--every", "10",
        "--csv", csv.to_str().unwrap(), "--snapshot", snap.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&csv).unwrap();
    let t = read_table(&csv);
    assert_eq!(t.to_csv_string(), text);
    assert!(t.numbers("total").unwrap().iter().all(|v| v.abs() < 1e-3));
    let times = t.numbers("t").unwrap();
    assert_eq!(*times.last().unwrap(), 0.01);
    let s = Snapshot::read_from(std::fs::File::open(&snap).unwrap()).unwrap();
    assert_eq!((s.n, s.res, s.t), (2, 32, 0.01));
    assert!(s.to_metric().unwrap().check_positive_definite().is_ok());
}

#[test]
fn ricci_flow_reports_identity_residuals() {
    let o = curvlab(&["flow", "--n", "2", "--res", "32", "--t-end", "0.002", "--every", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let t = Table::read_from(o.stdout.as_slice()).unwrap();
    assert!(t.rows.len() >= 3);
    let resid = t.column("identity_residual").unwrap();
    assert!(resid[0].as_f64().is_none());
    assert!(resid[1..].iter().all(|c| c.as_f64().is_some_and(|r| r < 0.05)), "{resid:?}");
}

#[test]
fn three_dimensional_deturck_run_stays_positive_definite() {
    let dir = tempfile::tempdir().unwrap();
    let snap = dir.path().join("g.bin");
    let o = curvlab(&[
        "flow", "--kind", "deturck", "--n", "3", "--res", "16", "--perturbation", "anisotropic", "--t-end", "0.001",
        "--snapshot", snap.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = Snapshot::read_from(std::fs::File::open(&snap).unwrap()).unwrap();
    assert!(s.to_metric().unwrap().check_positive_definite().is_ok());
}

#[test]
fn oversized_time_step_is_numerical_failure() {
    let o = curvlab(&["flow", "--res", "32", "--dt", "0.01", "--t-end", "0.05"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("t = 0"), "{}", stderr(&o));
}

#[test]
fn flow_validation_errors() {
    assert_eq!(curvlab(&["flow", "--n", "3", "--res", "64"]).status.code(), Some(2));
    assert_eq!(curvlab(&["flow", "--res", "10"]).status.code(), Some(2));
    assert_eq!(curvlab(&["flow", "--kind", "conformal2d", "--perturbation", "anisotropic"]).status.code(), Some(2));
    assert_eq!(curvlab(&["flow", "--perturbation", "wobbly"]).status.code(), Some(2));
}

#[test]
fn integrals_report_flags_discrepancies() {
    let o = curvlab(&["integrals", "--n", "3", "--i", "1", "--a", "-1", "--b", "-0.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&o);
    assert!((v["ijkl"]["i"].as_f64().unwrap() - 0.4).abs() < 1e-15);
    assert!((v["ijkl"]["j"].as_f64().unwrap() + 0.2).abs() < 1e-15);
    assert_eq!(v["boundary_audit"].as_array().unwrap().len(), 8);
    let m = &v["moments"];
    assert!((m["gaussian_moment"].as_f64().unwrap() - m["gaussian_moment_quadrature"].as_f64().unwrap()).abs() < 1e-10);
    assert!(v["notes"].as_array().unwrap().len() >= 3);
}

#[test]
fn verify_filter_runs_only_integral_criteria() {
    let o = curvlab(&["verify", "--filter", "integrals", "--list"]);
    assert_eq!(o.status.code(), Some(0));
    let listed: Vec<String> = stdout(&o).lines().filter(|l| !l.starts_with(' ')).map(str::to_string).collect();
    assert_eq!(listed.len(), 5);
    assert!(listed.iter().all(|l| l.contains("integrals")));
}

#[test]
fn verify_passes_and_tampered_tolerance_fails() {
    let o = curvlab(&["verify", "--filter", "integral-recurrence"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("PASS [ 2] integral-recurrence"));
    let o = curvlab(&["verify", "--filter", "integral-recurrence", "--tol", "integral-recurrence.abs=1e-30"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("FAIL [ 2] integral-recurrence"), "{}", stdout(&o));
    assert_eq!(curvlab(&["verify", "--tol", "integral-recurrence.nope=1"]).status.code(), Some(2));
    assert_eq!(curvlab(&["verify", "--filter", "no-such-thing"]).status.code(), Some(2));
}

#[test]
fn thread_variable_is_validated() {
    let o = Command::new(env!("CARGO_BIN_EXE_curvlab"))
        .args(["verify", "--list"])
        .env("CURVLAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
