//! End-to-end runs of the `funcineq` binary, one group per verb.

use std::path::Path;
use std::process::{Command, Output};

use funcineq_cli::Report;

fn funcineq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_funcineq")).args(args).output().expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    funcineq(args).status.code().expect("exit code")
}

fn report(args: &[&str]) -> (i32, Report) {
    let out = funcineq(args);
    let text = String::from_utf8(out.stdout).unwrap();
    let r = Report::from_json(&text).unwrap_or_else(|e| panic!("{e}: {text} / {}", String::from_utf8_lossy(&out.stderr)));
    (out.status.code().unwrap(), r)
}

#[test]
fn certify_hi_exit_codes() {
    let (c, r) = report(&["certify-hi", "--potential", "1", "--R", "2.40"]);
    assert_eq!((c, r.certificate.status.as_str()), (0, "positive"));
    let (c, r) = report(&["certify-hi", "--potential", "1", "--R", "2.405"]);
    assert_eq!((c, r.certificate.status.as_str()), (1, "first_zero"));
    assert!((r.certificate.headline.unwrap() - 2.404825557695773).abs() < 1e-6);
    // The exact zero sits in the boundary band: undecidable, a numerical failure.
    let (c, r) = report(&["certify-hi", "--potential", "1", "--R", "2.404825557695773"]);
    assert_eq!((c, r.certificate.status.as_str()), (3, "inconclusive"));
    assert_eq!(code(&["certify-hi", "--potential", "pow(r,-3)", "--R", "1"]), 2);
    assert_eq!(code(&["certify-hi", "--potential", "1 +", "--R", "1"]), 2);
    assert_eq!(code(&["certify-hi", "--potential", "1"]), 2);
    assert_eq!(code(&["certify-hi", "--potential", "1", "--R", "1", "--n", "3"]), 2);
}

#[test]
fn certify_pair_exit_codes() {
    let hardy_plus = "0.25*pow(r,-2) + 1";
    assert_eq!(code(&["certify-pair", "--V", "1", "--W", hardy_plus, "--n", "3", "--R", "1"]), 0);
    let too_big = "0.25*pow(r,-2) + 10";
    assert_eq!(code(&["certify-pair", "--V", "1", "--W", too_big, "--n", "3", "--R", "1"]), 1);
    assert_eq!(code(&["certify-pair", "--V", "0 - 1", "--W", "1", "--n", "3", "--R", "1"]), 2);
    assert_eq!(code(&["certify-pair", "--V", "1", "--W", "1", "--n", "3", "--R", "1", "--lambda", "5"]), 2);
}

#[test]
fn beta_reports_the_bessel_constant() {
    let (c, r) = report(&["beta", "--potential", "1", "--n", "3", "--R", "1"]);
    assert_eq!(c, 0);
    let z0 = 2.404825557695773f64;
    assert!((r.certificate.headline.unwrap() / (z0 * z0) - 1.0).abs() < 1e-3);
    assert_eq!(code(&["beta", "--potential", "1", "--n", "0", "--R", "1"]), 2);
    assert_eq!(code(&["beta", "--potential", "1", "--n", "3", "--R", "-1"]), 2);
}

#[test]
fn rayleigh_hardy_and_rejections() {
    let (c, r) = report(&["rayleigh", "--form", "hardy", "--n", "3", "--grid", "256"]);
    assert_eq!(c, 0);
    let v = r.certificate.headline.unwrap();
    assert!((0.25..=0.27).contains(&v), "{v}");
    assert_eq!(code(&["rayleigh", "--form", "cubic", "--n", "3"]), 2);
    assert_eq!(code(&["rayleigh", "--form", "improved-hardy", "--n", "3"]), 2);
    assert_eq!(code(&["rayleigh", "--form", "hardy-sobolev", "--n", "3", "--s", "1"]), 0);
}

#[test]
fn verify_single_checks() {
    let bump = "pow(1 - pow(r,2),2)";
    let base = ["verify", "--profile", bump, "--n", "3", "--R", "1"];
    let with = |extra: &[&str]| -> Vec<String> { base.iter().chain(extra).map(|s| s.to_string()).collect() };
    let run = |extra: &[&str]| {
        let a = with(extra);
        code(&a.iter().map(String::as_str).collect::<Vec<_>>())
    };
    assert_eq!(run(&["--check", "improved-hardy", "--potential", "1"]), 0);
    // P = 30 is far above β(1, 1): the bump itself violates the inequality.
    assert_eq!(run(&["--check", "improved-hardy", "--potential", "30"]), 1);
    assert_eq!(run(&["--check", "distance"]), 0);
    assert_eq!(run(&["--check", "distance", "--k", "2"]), 2);
    assert_eq!(run(&["--check", "e-weight-interior", "--potential", "pow(r,-1)"]), 0);
    assert_eq!(run(&["--check", "hardy-rellich", "--V", "1", "--W", "0"]), 0);
    assert_eq!(run(&["--check", "boundary-first", "--V", "1", "--W", "0"]), 0);
    assert_eq!(run(&["--check", "improved-hardy"]), 2);
    assert_eq!(code(&["verify", "--check", "distance", "--n", "3"]), 2);
}

#[test]
fn verify_profile_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.csv");
    let mut csv = String::from("r,u\n");
    for i in 0..=40 {
        let r = i as f64 / 40.0;
        csv.push_str(&format!("{r},{}\n", (1.0 - r * r).powi(2)));
    }
    std::fs::write(&path, csv).unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(code(&["verify", "--check", "improved-hardy", "--potential", "1", "--profile-file", p]), 0);
    assert_eq!(code(&["verify", "--check", "distance", "--profile-file", "/nonexistent/u.csv"]), 2);
}

#[test]
fn transport_checks() {
    let (c, r) = report(&["transport-check", "--check", "w2", "--m0", "1", "--s0", "2"]);
    assert_eq!(c, 0);
    assert!((r.certificate.headline.unwrap() - 2f64.sqrt()).abs() < 1e-4);
    for check in ["talagrand", "log-sobolev", "hwi", "hwbi", "master", "energy-entropy"] {
        assert_eq!(code(&["transport-check", "--check", check, "--m0", "0.5", "--s0", "0.8"]), 0, "{check}");
    }
    assert_eq!(code(&["transport-check", "--check", "w2", "--s0=-1"]), 2);
    assert_eq!(code(&["transport-check", "--check", "entropy"]), 2);
    assert_eq!(code(&["transport-check"]), 2);
}

#[test]
fn transport_density_files() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, shift: f64| {
        let mut s = String::from("x,rho\n");
        for i in 0..=800 {
            let x = -8.0 + 16.0 * i as f64 / 800.0;
            s.push_str(&format!("{x},{}\n", (-(x - shift) * (x - shift) / 2.0).exp()));
        }
        let p = dir.path().join(name);
        std::fs::write(&p, s).unwrap();
        p
    };
    let (a, b) = (write("a.csv", 0.5), write("b.csv", 0.0));
    let (c, r) = report(&["transport-check", "--check", "w2", "--rho0", a.to_str().unwrap(), "--rho1", b.to_str().unwrap()]);
    assert_eq!(c, 0);
    assert!((r.certificate.headline.unwrap() - 0.5).abs() < 1e-3);
    assert_eq!(r.certificate.passed, None);
}

#[test]
fn moser_tasks() {
    let (c, r) = report(&["moser", "--task", "threshold", "--n", "2"]);
    assert_eq!(c, 0);
    assert_eq!(r.certificate.headline, Some(4.0 * std::f64::consts::PI));
    assert!(r.certificate.notes.iter().any(|n| n.contains("I_alpha")));
    assert_eq!(code(&["moser", "--task", "threshold", "--n", "2", "--alpha", "2"]), 2);
    assert_eq!(code(&["moser", "--task", "aubin", "--alpha", "1"]), 0);
    assert_eq!(code(&["moser", "--task", "identity"]), 0);
    assert_eq!(code(&["moser", "--task", "singular", "--k", "6"]), 0);
    let (c, r) = report(&["moser", "--task", "minimize", "--alpha", "0.4"]);
    assert_eq!((c, r.certificate.status.as_str()), (0, "diverging"));
    assert_eq!(code(&["moser", "--task", "minimize"]), 2);
    assert_eq!(code(&["moser", "--task", "fly"]), 2);
}

#[test]
fn moser_minimize_writes_a_trace() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.json");
    assert_eq!(code(&["moser", "--task", "minimize", "--alpha", "1", "--quiet", "--out", out.to_str().unwrap()]), 0);
    let trace = std::fs::read_to_string(out.with_extension("trace.csv")).unwrap();
    assert!(trace.starts_with("iteration,value,constraint_residual\n"));
    assert!(trace.lines().count() > 2);
}

fn stored(dir: &Path, args: &[&str]) -> std::path::PathBuf {
    let out = dir.join("r.json");
    let mut a: Vec<&str> = args.to_vec();
    let o = out.to_str().unwrap().to_string();
    a.extend(["--quiet", "--out"]);
    let status = Command::new(env!("CARGO_BIN_EXE_funcineq")).args(&a).arg(&o).status().unwrap();
    assert!(status.code().is_some());
    out
}

#[test]
fn report_rechecks_stored_reports() {
    let dir = tempfile::tempdir().unwrap();
    let path = stored(dir.path(), &["beta", "--potential", "1", "--n", "3", "--R", "1"]);
    let p = path.to_str().unwrap();
    let (c, r) = report(&["report", "--input", p]);
    assert_eq!(c, 0);
    assert_eq!(r.result["payload_identical"], true);

    let mut tampered = Report::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    tampered.result["value"] = serde_json::json!(6.0);
    std::fs::write(&path, tampered.to_json()).unwrap();
    let (c, r) = report(&["report", "--input", p]);
    assert_eq!(c, 1);
    assert_eq!(r.result["differing_keys"], serde_json::json!(["result"]));

    std::fs::write(&path, "{ not json").unwrap();
    assert_eq!(code(&["report", "--input", p]), 2);
    assert_eq!(code(&["report", "--input", "/nonexistent/r.json"]), 2);
}

#[test]
fn config_file_mirrors_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("beta.toml");
    std::fs::write(&cfg, "potential = \"1\"\nn = 3\nR = 2\n").unwrap();
    let (c, r) = report(&["beta", "--config", cfg.to_str().unwrap()]);
    assert_eq!(c, 0);
    assert_eq!(r.inputs["R"], 2.0);
    let (_, r) = report(&["beta", "--config", cfg.to_str().unwrap(), "--R", "1"]);
    assert_eq!(r.inputs["R"], 1.0);
    std::fs::write(&cfg, "potential = \"1\"\nradius = 3\n").unwrap();
    assert_eq!(code(&["beta", "--config", cfg.to_str().unwrap()]), 2);
}

#[test]
fn sweep_writes_one_row_per_point() {
    let out = funcineq(&["sweep", "--template", "beta --potential 1 --n 3", "--grid", "R=0.5,1,2", "--jobs", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "index,R,exit_code,status,headline,message");
    assert_eq!(lines.len(), 4);
    let empty = funcineq(&["sweep", "--template", "beta --potential 1 --n 3", "--grid", ""]);
    assert_eq!(empty.status.code(), Some(0));
    assert_eq!(String::from_utf8(empty.stdout).unwrap().lines().count(), 1);
    assert_eq!(code(&["sweep", "--template", "beta --potential 1 --n 3", "--grid", "radius=1"]), 2);
    assert_eq!(code(&["sweep", "--template", "sweep --template x", "--grid", "R=1"]), 2);
}

#[test]
fn unknown_flags_and_verbs_are_rejected() {
    assert_eq!(code(&["beta", "--potential", "1", "--n", "3", "--R", "1", "--frobnicate"]), 2);
    assert_eq!(code(&["integrate"]), 2);
    assert_eq!(code(&[]), 2);
    assert_eq!(code(&["--version"]), 0);
}
