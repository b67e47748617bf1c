//! Cross-module checks through the public API only.

use funcineq::bessel_certify::{is_bessel_pair, is_hi_potential, PairSpec};
use funcineq::best_constants::{beta_constant, closed_constants, rayleigh_minimize, ClosedKind, QuadraticForm};
use funcineq::moser::{i_alpha, singular_moser_threshold, LineFunction};
use funcineq::radial_ode::Status;
use funcineq::transport::{legendre, wasserstein_1d, DensityGrid, GridFunction};
use funcineq::verifier::{check_improved_hardy, RadialTestFunction};
use funcineq::weight_dsl::{parse_weight, BESSEL_J0_FIRST_ZERO};
use funcineq::Error;

#[test]
fn parsed_potential_flows_into_certificate_and_constant() {
    let p = parse_weight("1").unwrap();
    let zero = is_hi_potential(&p, 3.0).unwrap();
    assert_eq!(zero.status, Status::FirstZero);
    // β(1, R) is the largest c with c·R² below the first zero squared.
    let r = zero.zero.unwrap();
    let b = beta_constant(&p, 2, r).unwrap().value;
    assert!((b * r * r / (BESSEL_J0_FIRST_ZERO * BESSEL_J0_FIRST_ZERO) - 1.0).abs() < 1e-3, "{b}");
}

#[test]
fn hi_certificate_agrees_with_its_hardy_shifted_pair() {
    for (text, radius) in [("pow(r,-1)", 1.0), ("1", 2.0), ("1", 2.6), ("4", 1.0)] {
        let p = parse_weight(text).unwrap();
        let hi = is_hi_potential(&p, radius).unwrap().status;
        for n in [3, 4] {
            let pair = is_bessel_pair(&PairSpec::hardy_shift(n, &p, radius).unwrap()).unwrap().status;
            assert_eq!(hi, pair, "{text} R={radius} n={n}");
        }
    }
}

#[test]
fn rayleigh_values_bound_the_closed_constants_from_above() {
    for n in [3, 4, 6] {
        let closed = closed_constants(&ClosedKind::Interior, n).unwrap();
        let v = rayleigh_minimize(&QuadraticForm::hardy(n, 1.0), 512).unwrap().value;
        assert!(v >= closed - 1e-4 && v <= closed * 1.1 + 0.02, "n={n}: {v} vs {closed}");
    }
}

#[test]
fn verifier_accepts_certified_potentials_and_rejects_bad_profiles() {
    let p = parse_weight("1").unwrap();
    assert!(is_hi_potential(&p, 1.0).unwrap().is_positive());
    let u = RadialTestFunction::parse("pow(1 - pow(r,2),2)", 1.0).unwrap();
    assert!(check_improved_hardy(&p, &u, 3, 1.0).unwrap().pass);
    let bad = RadialTestFunction::parse("2 - r", 1.0).unwrap();
    assert!(matches!(check_improved_hardy(&p, &bad, 3, 1.0), Err(Error::InvalidInput(_))));
}

#[test]
fn transport_primitives_match_closed_forms() {
    let a = DensityGrid::gaussian(-0.5, 0.7, 4001).unwrap();
    let b = DensityGrid::gaussian(1.0, 1.3, 4001).unwrap();
    let w = wasserstein_1d(&a, &b).unwrap().value;
    assert!((w - (1.5f64.powi(2) + 0.6f64.powi(2)).sqrt()).abs() < 1e-4, "{w}");
    // (x²/2)* = y²/2 for |y| inside the slope range.
    let f = GridFunction::sample(-4.0, 4.0, 2001, |x| 0.5 * x * x).unwrap();
    let g = legendre(&f).unwrap();
    for (y, v) in g.xs.iter().zip(&g.values).filter(|(y, _)| y.abs() <= 3.0) {
        assert!((v - 0.5 * y * y).abs() < 1e-4, "y={y}: {v}");
    }
}

#[test]
fn moser_entry_points_agree_on_simple_inputs() {
    let zero = LineFunction::sample(33, |_| 0.0).unwrap();
    assert!(i_alpha(&zero, 1.0).unwrap().abs() < 1e-12);
    assert_eq!(singular_moser_threshold(2, 0.0).unwrap(), 4.0 * std::f64::consts::PI);
    assert!(singular_moser_threshold(1, 0.0).is_err());
}
