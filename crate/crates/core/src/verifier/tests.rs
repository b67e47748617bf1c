use std::f64::consts::PI;

use proptest::prelude::*;

use super::*;
use crate::radial_ode::{first_zero, integrate_singular_ode, RadialCoefficients, DEFAULT_TOL};

fn w(text: &str) -> WeightExpr {
    parse_weight(text).unwrap()
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(1e-300)
}

#[test]
fn polynomial_integrals_match_closed_forms() {
    let u = RadialTestFunction::parse("1 - pow(r,2)", 1.0).unwrap();
    let i = weighted_integrals(&u, &WeightExpr::constant(1.0), 3).unwrap();
    assert!(close(i.gradient.value, 16.0 * PI / 5.0, 1e-10), "{}", i.gradient.value);
    assert!(close(i.mass.value, 32.0 * PI / 105.0, 1e-10));
    assert!(i.gradient.error < 1e-9);
    // Δu = -6
    assert!(close(i.laplacian.unwrap().value, 36.0 * 4.0 * PI / 3.0, 1e-10));
}

#[test]
fn zero_function_gives_zero() {
    let u = RadialTestFunction::parse("0", 1.0).unwrap();
    let i = weighted_integrals(&u, &w("pow(r,-2)"), 3).unwrap();
    assert_eq!(i.gradient.value, 0.0);
    assert_eq!(i.mass.value, 0.0);
    let c = check_improved_hardy(&WeightExpr::constant(1.0), &u, 3, 1.0).unwrap();
    assert!(c.pass);
}

#[test]
fn singular_weight_integrals() {
    let u = RadialTestFunction::parse("1 - r", 1.0).unwrap();
    let i = weighted_integrals(&u, &w("pow(r,-2)"), 3).unwrap();
    assert!(close(i.gradient.value, 4.0 * PI, 1e-10));
    assert!(close(i.mass.value, 4.0 * PI / 3.0, 1e-10));
}

#[test]
fn divergent_integral_is_reported() {
    let u = RadialTestFunction::parse("1 - r", 1.0).unwrap();
    assert!(weighted_integrals(&u, &w("pow(r,-3)"), 3).is_err());
}

#[test]
fn improved_hardy_on_a_bump() {
    let u = RadialTestFunction::parse("1 - pow(r,2)", 1.0).unwrap();
    let c = check_improved_hardy(&WeightExpr::constant(1.0), &u, 3, 1.0).unwrap();
    let rhs = PI * 8.0 / 15.0 + 32.0 * PI / 105.0;
    assert!(close(c.lhs, 16.0 * PI / 5.0, 1e-10));
    assert!(close(c.rhs, rhs, 1e-10));
    assert!(c.pass);
}

#[test]
fn improved_hardy_requires_zero_boundary_value() {
    let u = RadialTestFunction::parse("2 - pow(r,2)", 1.0).unwrap();
    assert!(matches!(check_improved_hardy(&WeightExpr::constant(1.0), &u, 3, 1.0), Err(Error::InvalidInput(_))));
}

fn adversarial() -> (RadialTestFunction, f64) {
    let coeffs = RadialCoefficients::radial_laplacian(2, WeightExpr::constant(1.0), 3.5).unwrap();
    let trace = integrate_singular_ode(&coeffs, DEFAULT_TOL).unwrap();
    let z = first_zero(&trace).unwrap();
    let scale = z / 3.2;
    (RadialTestFunction::from_trace(trace, scale, 3.2, 3.5).unwrap(), scale * scale)
}

#[test]
fn adversarial_profile_breaks_an_uncertified_potential() {
    // P ≡ 1 on the disc of radius 3.5 exceeds the first Dirichlet eigenvalue.
    let (u, lambda) = adversarial();
    assert_eq!(u.smoothness, Smoothness::H10);
    let c = check_improved_hardy(&WeightExpr::constant(1.0), &u, 2, 3.5).unwrap();
    assert!(!c.pass);
    assert!(close(c.lhs / c.rhs, lambda, 1e-6), "{} vs {lambda}", c.lhs / c.rhs);
}

#[test]
fn hardy_rellich_on_a_bump() {
    let u = RadialTestFunction::parse("pow(1 - pow(r,2),2)", 1.0).unwrap();
    let c = check_hardy_rellich_radial(&WeightExpr::constant(1.0), &w("2.25 * pow(r,-2)"), &u, 5, 1.0).unwrap();
    let s4 = 8.0 * PI * PI / 3.0;
    assert!(close(c.lhs, s4 * 64.0 / 9.0, 1e-10), "{}", c.lhs);
    assert!(close(c.rhs, s4 * 25.0 / 4.0 * 128.0 / 315.0, 1e-10));
    assert!(c.pass);
}

#[test]
fn hardy_rellich_requires_clamped_boundary() {
    let u = RadialTestFunction::parse("1 - pow(r,2)", 1.0).unwrap();
    let r = check_hardy_rellich_radial(&WeightExpr::constant(1.0), &WeightExpr::constant(0.0), &u, 5, 1.0);
    assert!(r.is_err());
}

#[test]
fn theta_matches_closed_form() {
    let u = RadialTestFunction::parse("1 - 0.5 * pow(r,2)", 1.0).unwrap();
    let wt = WeightExpr::constant(20.0);
    let one = WeightExpr::constant(1.0);
    let out = check_boundary_terms(&one, &wt, &u, 3, 1.0, BoundaryForm::FirstOrder).unwrap();
    let i = weighted_integrals(&u, &one, 3).unwrap();
    let oracle = ((20.0 * i.mass.value - i.gradient.value) / (4.0 * PI * 0.25)).max(0.0);
    assert!(oracle > 0.0);
    let theta = out.theta.unwrap();
    assert!((theta - oracle).abs() <= 1e-6 * oracle.max(1.0), "{theta} vs {oracle}");
    assert!(out.outcome.pass);

    let small = check_boundary_terms(&one, &WeightExpr::constant(0.1), &u, 3, 1.0, BoundaryForm::FirstOrder).unwrap();
    assert_eq!(small.theta, Some(0.0));
}

#[test]
fn theta_is_none_without_a_boundary_term() {
    let u = RadialTestFunction::parse("1 - pow(r,2)", 1.0).unwrap();
    let out = check_boundary_terms(
        &WeightExpr::constant(1.0),
        &WeightExpr::constant(100.0),
        &u,
        3,
        1.0,
        BoundaryForm::FirstOrder,
    )
    .unwrap();
    assert_eq!(out.theta, None);
    assert!(!out.outcome.pass);
}

#[test]
fn second_order_boundary_form() {
    let u = RadialTestFunction::parse("1 - pow(r,2)", 1.0).unwrap();
    let out = check_boundary_terms(
        &WeightExpr::constant(1.0),
        &w("2.25 * pow(r,-2)"),
        &u,
        5,
        1.0,
        BoundaryForm::SecondOrder,
    )
    .unwrap();
    assert!(out.reading.is_some());
    let theta = out.theta.unwrap();
    assert!(theta >= 0.0 && out.outcome.pass);
}

#[test]
fn e_weight_interior_reproduces_hardy() {
    let u = RadialTestFunction::parse("pow(1 - pow(r,2),2)", 1.0).unwrap();
    let e = check_e_weight(&w("pow(r,-1)"), EWeightMode::Interior, &u, 3).unwrap();
    let h = check_improved_hardy(&WeightExpr::constant(0.0), &u, 3, 1.0).unwrap();
    assert!(close(e.rhs, h.rhs, 1e-10));
    assert!(e.pass);
}

#[test]
fn e_weight_boundary_mode() {
    let u = RadialTestFunction::parse("pow(1 - pow(r,2),2)", 1.0).unwrap();
    let c = check_e_weight(&w("1 - pow(r,2)"), EWeightMode::Boundary, &u, 3).unwrap();
    assert!(c.pass, "{c:?}");
    assert!(check_e_weight(&w("2 - pow(r,2)"), EWeightMode::Boundary, &u, 3).is_err());
    assert!(check_e_weight(&w("1 + pow(r,2)"), EWeightMode::Interior, &u, 3).is_err());
    // -ΔE < 0
    assert!(check_e_weight(&w("1 - pow(r,4) - 0.9*(1 - pow(r,2))"), EWeightMode::Boundary, &u, 3).is_err());
}

#[test]
fn distance_hardy_point_case_and_rejections() {
    let u = RadialTestFunction::parse("pow(1 - pow(r,2),2)", 1.0).unwrap();
    let c = check_distance_hardy(3, &u, 3, 1.0).unwrap();
    let h = check_improved_hardy(&WeightExpr::constant(0.0), &u, 3, 1.0).unwrap();
    assert!(close(c.rhs, h.rhs, 1e-12));
    assert!(check_distance_hardy(2, &u, 3, 1.0).is_err());
    assert!(check_distance_hardy(2, &u, 4, 1.0).is_err());
}

#[test]
fn distance_hardy_on_the_interval() {
    let u = RadialTestFunction::parse("r * (1 - r)", 1.0).unwrap();
    let c = check_distance_hardy_interval(&u).unwrap();
    assert!(close(c.lhs, 1.0 / 3.0, 1e-12));
    assert!(close(c.lhs / c.rhs, 16.0 / 7.0, 1e-10));
    assert!(c.pass);
}

#[test]
fn family_is_deterministic_and_admissible() {
    let a = profile_family(7, 1.0, 3).unwrap();
    let b = profile_family(7, 1.0, 3).unwrap();
    assert_eq!(a.len(), 50);
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.function.eval(0.3).0, y.function.eval(0.3).0);
        let f = &x.function;
        assert!(f.has_second_derivative());
        assert!(f.vanishes_at_boundary(), "{}", x.label);
        assert!(f.boundary_slope.abs() < 1e-10, "{}", x.label);
        assert!(f.eval(0.0).1.abs() < 1e-12);
        let c = check_improved_hardy(&WeightExpr::constant(0.0), f, 3, 1.0).unwrap();
        assert!(c.pass, "{} {c:?}", x.label);
    }
}

#[test]
fn csv_round_trip() {
    let u = RadialTestFunction::parse("pow(1 - pow(r,2),2)", 1.0).unwrap();
    let v = RadialTestFunction::from_csv(&u.to_csv(201), 0.0).unwrap();
    for r in [0.1, 0.47, 0.9] {
        assert!((u.eval(r).0 - v.eval(r).0).abs() < 1e-6);
    }
    assert!(RadialTestFunction::from_csv("r,u\n0,1\nx,2\n", 0.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn checks_scale_quadratically(idx in 0usize..50, c in -3.0f64..3.0) {
        let fam = profile_family(11, 1.0, 4).unwrap();
        let u = &fam[idx].function;
        let p = WeightExpr::constant(1.0);
        let a = check_improved_hardy(&p, u, 4, 1.0).unwrap();
        let b = check_improved_hardy(&p, &u.scaled(c), 4, 1.0).unwrap();
        prop_assert!((b.lhs - c * c * a.lhs).abs() <= 1e-9 * a.lhs.abs().max(1e-12));
        prop_assert!((b.rhs - c * c * a.rhs).abs() <= 1e-9 * a.rhs.abs().max(1e-12));
        prop_assert_eq!(a.pass, b.pass || c == 0.0);
    }
}

#[test]
fn soundness_sweep_over_the_family() {
    let s = soundness_sweep(7, 1.0).unwrap();
    let bad: Vec<_> = s.failures().collect();
    assert!(bad.is_empty(), "{bad:?}");
    assert!(s.total >= 600, "{} checks; certified {:?}; rejected {:?}", s.total, s.certified_inputs, s.rejected_inputs);
}
