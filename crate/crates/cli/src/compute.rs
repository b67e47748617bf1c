use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use funcineq::bessel_certify::{hi_coefficients, pair_coefficients, PairSpec};
use funcineq::best_constants::{
    beta_constant, hardy_sobolev_value, rayleigh_sequence, QuadraticForm,
};
use funcineq::moser::{
    aubin_threshold_probe, ghigi_minimize, ghigi_phi, i_alpha, j_alpha_sphere, minimize_i_alpha, random_convex,
    singular_moser_check, singular_moser_threshold, LineFunction, MinimizeStatus, SphereFunction,
};
use funcineq::radial_ode::{boundary_zone, certify_positive, PositivityCertificate, Status};
use funcineq::transport::{
    check_energy_entropy, check_hwbi, check_master_inequality, sobolev_duality_gap, wasserstein_1d, yamabe_check,
    DensityGrid, EnergySpec, Geometry, HwbiMode, Internal, YoungPair,
};
use funcineq::verifier::{
    check_boundary_terms, check_distance_hardy, check_distance_hardy_interval, check_e_weight,
    check_hardy_rellich_radial, check_improved_hardy, soundness_sweep, BoundaryForm, CheckOutcome, EWeightMode,
    RadialTestFunction,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{CliError, Result};
use crate::inputs::{Args, Inputs, Verb};
use crate::report::{Certificate, Outcome, Report};

/// How the line functional is normalised; stated in every Moser report.
const I_ALPHA_CONVENTION: &str =
    "I_alpha(g) = (alpha/2) int (1-x^2) g'^2 dx + int g dx - log((1/2) int e^{2g} dx) on (-1, 1)";

fn value(x: &impl Serialize) -> Value {
    serde_json::to_value(x).expect("results serialize to plain JSON")
}

fn tolerances(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn outcome(result: Value, certificate: Certificate, tol: &[(&str, f64)]) -> Outcome {
    Outcome { result, certificate, tolerances: tolerances(tol), fingerprints: BTreeMap::new() }
}

pub(crate) fn dispatch(verb: Verb, inputs: &Inputs) -> Result<Outcome> {
    match verb {
        Verb::CertifyHi => certify_hi(inputs),
        Verb::CertifyPair => certify_pair(inputs),
        Verb::Beta => beta(inputs),
        Verb::Rayleigh => rayleigh(inputs),
        Verb::Verify => verify(inputs),
        Verb::TransportCheck => transport(inputs),
        Verb::Moser => moser(inputs),
        Verb::Report => recheck(inputs),
    }
}

fn positivity(cert: PositivityCertificate, tol: f64) -> Outcome {
    let certificate = match cert.status {
        Status::Positive => Certificate { status: "positive".into(), passed: Some(true), exit_code: 0, ..Certificate::info("", None) },
        Status::FirstZero => Certificate { status: "first_zero".into(), passed: Some(false), exit_code: 1, ..Certificate::info("", cert.zero) },
        Status::Inconclusive => Certificate {
            status: "inconclusive".into(),
            passed: None,
            exit_code: 3,
            headline: cert.zero,
            notes: cert.reason.iter().cloned().collect(),
        },
    };
    let mut out = outcome(value(&cert), certificate, &[("ode_tol", tol), ("boundary_zone", boundary_zone(cert.radius, tol))]);
    out.fingerprints.insert("solver_settings".into(), cert.settings_hash.clone());
    out
}

fn certify_hi(inputs: &Inputs) -> Result<Outcome> {
    let p = inputs.req_weight("potential")?;
    let radius = inputs.req_f64("R")?;
    let tol = inputs.req_f64("tol")?;
    let cert = certify_positive(&hi_coefficients(&p, radius)?, tol)?;
    Ok(positivity(cert, tol))
}

fn certify_pair(inputs: &Inputs) -> Result<Outcome> {
    let spec = PairSpec::new(
        inputs.req_weight("V")?,
        inputs.req_weight("W")?,
        inputs.req_u32("n")?,
        inputs.req_f64("R")?,
        inputs.f64("lambda"),
    )?;
    let tol = inputs.req_f64("tol")?;
    let cert = certify_positive(&pair_coefficients(&spec)?, tol)?;
    Ok(positivity(cert, tol))
}

fn beta(inputs: &Inputs) -> Result<Outcome> {
    let p = inputs.req_weight("potential")?;
    let r = beta_constant(&p, inputs.req_u32("n")?, inputs.req_f64("R")?)?;
    let mut cert = Certificate::info("computed", Some(r.value));
    if let Some(cc) = &r.cross_check {
        if !cc.agrees {
            cert = cert.note(format!("Rayleigh cross-check differs by {:.3e} (relative)", cc.relative_gap));
        }
    }
    Ok(outcome(value(&r), cert, &[("bisection_rel_width", 1e-7), ("cross_check_rel", 1e-2)]))
}

fn rayleigh(inputs: &Inputs) -> Result<Outcome> {
    let n = inputs.req_u32("n")?;
    let radius = inputs.req_f64("R")?;
    let form = inputs.req_text("form")?;
    if form == "hardy-sobolev" {
        let s = inputs.req_f64("s")?;
        let r = hardy_sobolev_value(n, s)?;
        return Ok(outcome(value(&r), Certificate::info("computed", Some(r.value)), &[("family_tol", 1e-10)]));
    }
    let form = match form {
        "hardy" => QuadraticForm::hardy(n, radius),
        "hardy-rellich" => QuadraticForm::hardy_rellich(n, radius),
        _ => QuadraticForm::improved_hardy(n, &inputs.req_weight("potential")?, radius),
    };
    let grid = inputs.u64("grid").unwrap_or(256) as usize;
    let doublings = inputs.u64("doublings").unwrap_or(0) as u32;
    if !(8..=1 << 20).contains(&grid) || doublings > 12 {
        return Err(CliError::input("--grid must lie in [8, 2^20] and --doublings in [0, 12]"));
    }
    let seq = rayleigh_sequence(&form, grid, doublings)?;
    let values: Vec<f64> = seq.iter().map(|r| r.value).collect();
    let decreasing = values.windows(2).all(|w| w[1] <= w[0]);
    let growth: Vec<f64> = seq
        .windows(2)
        .filter_map(|w| Some(w[1].attainment_diagnostic? / w[0].attainment_diagnostic?))
        .collect();
    let last = *values.last().expect("at least one grid");
    let result = json!({ "sequence": value(&seq), "monotone_decreasing": decreasing, "diagnostic_growth": growth });
    Ok(outcome(result, Certificate::info("computed", Some(last)), &[]))
}

fn profile(inputs: &Inputs, radius: f64) -> Result<RadialTestFunction> {
    if let Some(text) = inputs.text("profile") {
        return Ok(RadialTestFunction::parse(text, radius)?);
    }
    if let Some(csv) = inputs.file("profile-file") {
        return Ok(RadialTestFunction::from_csv(csv, 0.0)?);
    }
    Err(CliError::input("this check needs --profile or --profile-file"))
}

fn check_result(o: CheckOutcome) -> Outcome {
    let cert = Certificate::verdict(o.pass, Some(o.margin));
    let cert = match &o.note {
        Some(n) => cert.note(n.clone()),
        None => cert,
    };
    outcome(value(&o), cert, &[("margin_floor", 0.0)])
}

fn verify(inputs: &Inputs) -> Result<Outcome> {
    let n = inputs.req_u32("n")?;
    let radius = inputs.req_f64("R")?;
    let check = inputs.req_text("check")?;
    if check == "family" {
        let seed = inputs.u64("seed").unwrap_or(7);
        let s = soundness_sweep(seed, radius)?;
        let mut by_kind: BTreeMap<String, (usize, usize)> = BTreeMap::new();
        for r in &s.records {
            let e = by_kind.entry(r.kind.clone()).or_default();
            e.0 += 1;
            e.1 += usize::from(!r.pass);
        }
        let min_slack = s.records.iter().map(|r| r.margin + r.error).fold(f64::INFINITY, f64::min);
        let failures: Vec<_> = s.failures().cloned().collect();
        let result = json!({
            "seed": seed,
            "radius": radius,
            "total": s.total,
            "unsound": s.unsound,
            "certified_inputs": s.certified_inputs,
            "rejected_inputs": s.rejected_inputs,
            "by_kind": by_kind.iter().map(|(k, (t, f))| (k.clone(), json!({ "checks": t, "failures": f }))).collect::<serde_json::Map<_, _>>(),
            "min_margin_plus_error": min_slack,
            "failures": value(&failures),
        });
        let mut out = outcome(result, Certificate::verdict(s.unsound == 0, Some(s.total as f64)), &[("margin_floor", 0.0)]);
        out.fingerprints.insert("family_seed".into(), seed.to_string());
        return Ok(out);
    }
    let u = profile(inputs, radius)?;
    let need = |k: &str| inputs.req_weight(k);
    Ok(match check {
        "improved-hardy" => check_result(check_improved_hardy(&need("potential")?, &u, n, radius)?),
        "hardy-rellich" => check_result(check_hardy_rellich_radial(&need("V")?, &need("W")?, &u, n, radius)?),
        "boundary-first" | "boundary-second" => {
            let form = if check == "boundary-first" { BoundaryForm::FirstOrder } else { BoundaryForm::SecondOrder };
            let b = check_boundary_terms(&need("V")?, &need("W")?, &u, n, radius, form)?;
            let mut cert = Certificate::verdict(b.theta.is_some(), b.theta);
            if let Some(r) = &b.reading {
                cert = cert.note(r.clone());
            }
            outcome(value(&b), cert, &[("theta_rel", 1e-6)])
        }
        "e-weight-interior" | "e-weight-boundary" => {
            let mode = if check == "e-weight-interior" { EWeightMode::Interior } else { EWeightMode::Boundary };
            check_result(check_e_weight(&need("potential")?, mode, &u, n)?)
        }
        "distance" => {
            let k = inputs.f64("k").unwrap_or(n as f64);
            if k.fract() != 0.0 || k < 1.0 {
                return Err(CliError::input("--k must be a positive integer codimension"));
            }
            check_result(check_distance_hardy(k as u32, &u, n, radius)?)
        }
        _ => check_result(check_distance_hardy_interval(&u)?),
    })
}

fn density(inputs: &Inputs, file: &str, mean: &str, sd: &str) -> Result<(DensityGrid, bool)> {
    if let Some(csv) = inputs.file(file) {
        return Ok((DensityGrid::from_csv(csv, Geometry::Line)?, false));
    }
    let nodes = inputs.u64("grid").unwrap_or(2001) as usize;
    if !(3..=1_000_001).contains(&nodes) {
        return Err(CliError::input("--grid must lie in [3, 10^6 + 1]"));
    }
    Ok((DensityGrid::gaussian(inputs.req_f64(mean)?, inputs.req_f64(sd)?, nodes)?, true))
}

fn transport(inputs: &Inputs) -> Result<Outcome> {
    let check = inputs.req_text("check")?;
    if check == "duality" {
        let n = inputs.req_u32("n")?;
        let gap = sobolev_duality_gap(n, 0.05, 20.0)?;
        let (kappa, dev) = yamabe_check(n)?;
        let rel = gap.gap.abs() / gap.inf_side;
        let pass = rel <= 1e-2 && dev <= 1e-6;
        let result = json!({ "duality": value(&gap), "relative_gap": rel, "yamabe_kappa": kappa, "yamabe_residual": dev });
        return Ok(outcome(result, Certificate::verdict(pass, Some(rel)), &[("relative_gap", 1e-2), ("yamabe_residual", 1e-6)]));
    }
    let (rho0, g0) = density(inputs, "rho0", "m0", "s0")?;
    let (rho1, g1) = density(inputs, "rho1", "m1", "s1")?;
    let spec = EnergySpec::gaussian();
    let sigma = inputs.req_f64("s")?;
    let mut out = match check {
        "w2" => {
            let w = wasserstein_1d(&rho0, &rho1)?;
            if g0 && g1 {
                let (m0, s0, m1, s1) = (inputs.req_f64("m0")?, inputs.req_f64("s0")?, inputs.req_f64("m1")?, inputs.req_f64("s1")?);
                let closed = ((m0 - m1).powi(2) + (s0 - s1).powi(2)).sqrt();
                let dev = (w.value - closed).abs();
                let result = json!({ "w2": value(&w), "closed_form": closed, "deviation": dev });
                outcome(result, Certificate::verdict(dev <= 1e-4, Some(w.value)), &[("closed_form_abs", 1e-4)])
            } else {
                outcome(value(&w), Certificate::info("computed", Some(w.value)), &[])
            }
        }
        "talagrand" | "log-sobolev" | "hwi" | "hwbi" => {
            let mode: HwbiMode = check.parse()?;
            check_result(check_hwbi(&rho0, &rho1, &spec, mode)?)
        }
        "master" => {
            let young = YoungPair::quadratic(sigma)?;
            check_result(check_master_inequality(&rho0, &rho1, &spec, &young, inputs.req_f64("lambda")?)?)
        }
        _ => {
            let e = check_energy_entropy(&rho0, Internal::Entropy, &YoungPair::quadratic(sigma)?, None)?;
            let mut o = check_result(e.outcome.clone());
            o.result = value(&e);
            o
        }
    };
    out.fingerprints.insert("grid_nodes".into(), format!("{}/{}", rho0.len(), rho1.len()));
    Ok(out)
}

fn moser(inputs: &Inputs) -> Result<Outcome> {
    let task = inputs.req_text("task")?;
    let seed = inputs.u64("seed").unwrap_or(1);
    let budget = |d: u64| inputs.u64("budget").unwrap_or(d) as usize;
    let n = inputs.req_u32("n")?;
    let mut out = match task {
        "minimize" => {
            let r = minimize_i_alpha(inputs.req_f64("alpha")?, budget(300))?;
            let status = match r.status {
                MinimizeStatus::Converged => "converged",
                MinimizeStatus::Diverging => "diverging",
                MinimizeStatus::Inconclusive => "inconclusive",
            };
            outcome(value(&r), Certificate::info(status, Some(r.inf_estimate)), &[("constraint_residual", 1e-8)])
        }
        "aubin" => {
            let p = aubin_threshold_probe(inputs.req_f64("alpha")?, budget(150), seed)?;
            let cert = match p.verdict {
                Some(v) => Certificate::verdict(v, Some(p.min_estimate)),
                None => Certificate::info("open", Some(p.min_estimate))
                    .note("alpha lies in the open range; the result is exploratory"),
            };
            let tol = p.tolerance;
            outcome(value(&p), cert, &[("lower_bound_slack", tol)])
        }
        "ghigi" => {
            let search = ghigi_minimize(60, budget(200))?;
            let floor = (4.0 / PI).ln();
            let mut lowest = f64::INFINITY;
            for i in 0..200u64 {
                lowest = lowest.min(ghigi_phi(&random_convex(seed.wrapping_mul(1000) + i, 41)?)?);
            }
            let floor_holds = lowest >= floor - 1e-4 && search.best >= floor - 1e-4;
            let reached = search.best <= floor + 1e-2;
            let result = json!({
                "search": value(&search),
                "random_samples": 200,
                "lowest_random_sample": lowest,
                "floor": floor,
                "target_reached": reached,
            });
            let mut cert = Certificate::verdict(floor_holds, Some(search.best));
            if !reached {
                cert = cert.note(format!("minimisation stopped at {:.6}, above log(4/pi) + 1e-2", search.best));
            }
            outcome(result, cert, &[("floor_slack", 1e-4), ("target_slack", 1e-2)])
        }
        "threshold" => {
            let v = singular_moser_threshold(n, inputs.f64("alpha").unwrap_or(0.0))?;
            outcome(json!({ "beta_max": v }), Certificate::info("computed", Some(v)), &[])
        }
        "singular" => {
            let alpha = inputs.f64("alpha").unwrap_or(0.0);
            let beta = match inputs.f64("beta") {
                Some(b) => b,
                None => 0.9 * singular_moser_threshold(n, alpha)?,
            };
            let u = RadialTestFunction::moser(n, inputs.f64("k").unwrap_or(8.0))?;
            let o = singular_moser_check(n, alpha, beta, &u)?;
            let cert = Certificate::verdict(o.pass, Some(o.integral));
            outcome(value(&o), cert, &[])
        }
        _ => {
            let mut worst: f64 = 0.0;
            let mut rows = Vec::new();
            for i in 0..20u64 {
                let u = SphereFunction::random(seed.wrapping_mul(1000) + i, 6);
                let j = j_alpha_sphere(&u, 1.0)?;
                let g = i_alpha(&LineFunction::Axisymmetric { profile: u }, 1.0)?;
                worst = worst.max((j - g).abs());
                rows.push(json!({ "j": j, "i": g }));
            }
            let result = json!({ "max_difference": worst, "pairs": rows });
            outcome(result, Certificate::verdict(worst <= 1e-8, Some(worst)), &[("identity_abs", 1e-8)])
        }
    };
    out.certificate.notes.push(I_ALPHA_CONVENTION.into());
    out.fingerprints.insert("seed".into(), seed.to_string());
    Ok(out)
}

/// `report`: checks that a stored report round-trips and that a fresh run
/// of its command reproduces the payload.
fn recheck(inputs: &Inputs) -> Result<Outcome> {
    let text = inputs.file("input").expect("input is required");
    let stored = Report::from_json(text)?;
    let round_trip = Report::from_json(&stored.to_json())? == stored;
    let verb = Verb::parse(stored.command["verb"].as_str().unwrap_or_default())?;
    if verb == Verb::Report {
        return Err(CliError::input("a report of `report` cannot be re-checked"));
    }
    let args: Args = serde_json::from_value(stored.command["flags"].clone())?;
    let again = crate::fresh(verb, &Inputs::normalize(verb, &args)?, stored.command.clone())?;
    let differing: Vec<&str> = [
        ("schema_version", stored.schema_version != again.schema_version),
        ("inputs", stored.inputs != again.inputs),
        ("result", stored.result != again.result),
        ("certificate", stored.certificate != again.certificate),
        ("tolerances", stored.tolerances != again.tolerances),
        ("artifact_version", stored.artifact_version != again.artifact_version),
        ("fingerprints", stored.fingerprints != again.fingerprints),
    ]
    .into_iter()
    .filter_map(|(k, d)| d.then_some(k))
    .collect();
    let identical = stored.payload() == again.payload();
    let result = json!({
        "round_trip": round_trip,
        "payload_identical": identical,
        "differing_keys": differing,
        "stored_exit_code": stored.exit_code(),
        "rerun_exit_code": again.exit_code(),
    });
    Ok(outcome(result, Certificate::verdict(round_trip && identical, None), &[]))
}

/// Side files next to the report: optimizer traces and Rayleigh sequences.
pub(crate) fn write_artifacts(verb: Verb, inputs: &Inputs, report: &Report, path: &Path) -> Result<()> {
    let csv = match (verb, inputs.text("task")) {
        (Verb::Moser, Some("minimize")) => {
            let mut s = String::from("iteration,value,constraint_residual\n");
            for row in report.result["trace"].as_array().into_iter().flatten() {
                s.push_str(&format!("{},{:e},{:e}\n", row["iteration"], f(&row["value"]), f(&row["residual"])));
            }
            Some(("trace.csv", s))
        }
        (Verb::Rayleigh, _) => report.result["sequence"].as_array().map(|seq| {
            let mut s = String::from("grid,value,attainment_diagnostic\n");
            for r in seq {
                s.push_str(&format!("{},{:e},{:e}\n", r["grid_size"], f(&r["value"]), f(&r["attainment_diagnostic"])));
            }
            ("sequence.csv", s)
        }),
        _ => None,
    };
    if let Some((ext, body)) = csv {
        let target = path.with_extension(ext);
        std::fs::write(&target, body).map_err(|e| CliError::io(&target, e))?;
    }
    Ok(())
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap_or(f64::NAN)
}
