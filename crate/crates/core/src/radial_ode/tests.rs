use super::*;
use crate::weight_dsl::{builtin, parse_weight, Builtin, BESSEL_J0_FIRST_ZERO};
use proptest::prelude::*;

fn j0_series(x: f64) -> f64 {
    let q = -(x * x) / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        term *= q / (k as f64 * k as f64);
        sum += term;
    }
    sum
}

fn lap(n: u32, b: &str, radius: f64) -> RadialCoefficients {
    RadialCoefficients::radial_laplacian(n, parse_weight(b).unwrap(), radius).unwrap()
}

#[test]
fn constants_solve_the_free_equation() {
    let tr = integrate_singular_ode(&lap(2, "0", 10.0), 1e-10).unwrap();
    assert!(tr.y.iter().all(|&y| y == 1.0));
    assert_eq!(first_zero(&tr), None);
}

#[test]
fn planar_trace_matches_j0() {
    let tr = integrate_singular_ode(&lap(2, "1", 2.0), 1e-10).unwrap();
    let mut checked = 0;
    for (r, y) in tr.grid.iter().zip(&tr.y) {
        if *r >= 0.01 {
            assert!((y - j0_series(*r)).abs() < 1e-6, "r={r}: {y} vs {}", j0_series(*r));
            checked += 1;
        }
    }
    assert!(checked > 5);
    for r in [0.01, 0.3, 1.0, 1.7, 2.0] {
        let (y, _) = tr.eval(r).unwrap();
        assert!((y - j0_series(r)).abs() < 1e-6);
    }
}

#[test]
fn three_dimensional_trace_matches_sinc() {
    let tr = integrate_singular_ode(&lap(3, "1", 3.0), 1e-10).unwrap();
    for (i, r) in tr.grid.iter().enumerate() {
        let exact = r.sin() / r;
        let dexact = (r * r.cos() - r.sin()) / (r * r);
        assert!((tr.y[i] - exact).abs() < 1e-6);
        assert!((tr.dy[i] - dexact).abs() < 1e-6);
    }
}

#[test]
fn first_zeros() {
    let tr = integrate_singular_ode(&lap(2, "1", 3.0), 1e-10).unwrap();
    let z = first_zero(&tr).unwrap();
    assert!((z - 2.4048).abs() < 1e-3);
    assert!((z - BESSEL_J0_FIRST_ZERO).abs() < 1e-8, "{z}");
    let tr = integrate_singular_ode(&lap(3, "1", 4.0), 1e-10).unwrap();
    assert!((first_zero(&tr).unwrap() - std::f64::consts::PI).abs() < 1e-6);
}

#[test]
fn one_dimensional_principal_solution_is_sine() {
    let tr = integrate_singular_ode(&lap(1, "1", 4.0), 1e-10).unwrap();
    assert_eq!(tr.exponent, 1.0);
    assert!((first_zero(&tr).unwrap() - std::f64::consts::PI).abs() < 1e-7);
}

#[test]
fn certificates_around_the_first_bessel_zero() {
    assert!(certify_positive(&lap(2, "1", 2.40), 1e-10).unwrap().is_positive());
    let c = certify_positive(&lap(2, "1", 2.41), 1e-10).unwrap();
    assert_eq!(c.status, Status::FirstZero);
    assert!((c.zero.unwrap() - 2.4048).abs() < 1e-3);
    assert!(certify_positive(&lap(2, "0", 1e6), 1e-10).unwrap().is_positive());
}

#[test]
fn zero_next_to_the_boundary_is_inconclusive() {
    let c = certify_positive(&lap(2, "1", BESSEL_J0_FIRST_ZERO + 1e-12), 1e-10).unwrap();
    assert_eq!(c.status, Status::Inconclusive);
}

#[test]
fn tolerance_range_is_enforced() {
    let c = lap(2, "1", 1.0);
    assert!(matches!(integrate_singular_ode(&c, 1e-3), Err(Error::InvalidInput(_))));
    assert!(matches!(certify_positive(&c, 1e-13), Err(Error::InvalidInput(_))));
}

#[test]
fn trace_invariants() {
    let tr = integrate_singular_ode(&lap(2, "1", 5.0), 1e-8).unwrap();
    assert!(tr.grid.windows(2).all(|w| w[0] < w[1]));
    assert!(tr.local_error.iter().all(|&e| e <= 1e-8));
    assert!((tr.grid[0] - tr.r0).abs() <= 1e-15 * tr.r0);
    assert_eq!(*tr.grid.last().unwrap(), 5.0);
    assert!(tr.to_csv().starts_with("r,y,dy\n"));
}

#[test]
fn scaling_law_for_constant_potentials() {
    for beta in [0.25, 1.0, 4.0] {
        let tr = integrate_singular_ode(&lap(2, &beta.to_string(), 6.0), 1e-10).unwrap();
        let z = first_zero(&tr).unwrap();
        let expected = BESSEL_J0_FIRST_ZERO / f64::sqrt(beta);
        assert!((z - expected).abs() < 1e-6 * expected, "beta={beta}: {z}");
    }
}

#[test]
fn euler_equation_start_is_exact() {
    // y'' + (m-1)/r y' + c/r^2 y = 0 with double indicial root k = (2-m)/2.
    let (m, c) = (4.0_f64, 1.0_f64);
    let a = parse_weight(&format!("{}/r", m - 1.0)).unwrap();
    let b = parse_weight(&format!("{c}/pow(r,2)")).unwrap();
    let tr = integrate_singular_ode(&RadialCoefficients::new(a, b, 4, 1.0).unwrap(), 1e-10).unwrap();
    assert_eq!(tr.exponent, -1.0);
    let (y, _) = tr.eval(0.5).unwrap();
    let (y1, _) = tr.eval(1.0).unwrap();
    assert!((y / y1 - 2.0).abs() < 1e-8);
}

#[test]
fn critical_log_potential_stays_positive() {
    let p = builtin(&Builtin::InvSqLog { rho: 1.0 }).unwrap();
    let c = RadialCoefficients::radial_laplacian(2, p, 1.0 / std::f64::consts::E).unwrap();
    let cert = certify_positive(&c, 1e-10).unwrap();
    assert!(cert.is_positive(), "{cert:?}");
    // y ~ sqrt(log(1/r)) is the principal solution
    let tr = integrate_singular_ode(&c, 1e-10).unwrap();
    let ratio = |r: f64| tr.eval(r).unwrap().0 / (1.0 / r).ln().sqrt();
    assert!((ratio(1e-3) / ratio(0.3) - 1.0).abs() < 1e-2);
}

#[test]
fn too_singular_coefficients_are_rejected() {
    let b = parse_weight("pow(r,-3)").unwrap();
    let c = RadialCoefficients::radial_laplacian(2, b, 1.0).unwrap();
    assert!(matches!(certify_positive(&c, 1e-8), Err(Error::Unsupported(_))));
    let a = parse_weight("pow(r,-2)").unwrap();
    assert!(RadialCoefficients::new(a, WeightExpr::constant(1.0), 2, 1.0).is_err());
}

#[test]
fn certificates_are_deterministic() {
    let c = lap(3, "2.5", 3.0);
    let a = certify_positive(&c, 1e-9).unwrap();
    let b = certify_positive(&c, 1e-9).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.zero.unwrap().to_bits(), b.zero.unwrap().to_bits());
}

#[test]
fn sturm_comparison_on_catalog_pairs() {
    for radius in [1.0, 2.0, 3.0, 3.5, 4.0] {
        let weak = certify_positive(&lap(2, "0.5", radius), 1e-10).unwrap();
        let strong = certify_positive(&lap(2, "1", radius), 1e-10).unwrap();
        if strong.is_positive() {
            assert!(weak.is_positive(), "R={radius}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn sturm_comparison(c1 in 0.0f64..3.0, dc in 0.0f64..3.0, radius in 0.5f64..4.0, a in 0.0f64..1.5) {
        let p1 = WeightExpr::monomial(-a).scaled(c1);
        let p2 = WeightExpr::monomial(-a).scaled(c1 + dc);
        let cert1 = certify_positive(&RadialCoefficients::radial_laplacian(2, p1, radius).unwrap(), 1e-9).unwrap();
        let cert2 = certify_positive(&RadialCoefficients::radial_laplacian(2, p2, radius).unwrap(), 1e-9).unwrap();
        if cert2.is_positive() {
            prop_assert!(cert1.status != Status::FirstZero);
        }
        if let (Some(z1), Some(z2)) = (cert1.zero, cert2.zero) {
            prop_assert!(z2 <= z1 * (1.0 + 1e-8));
        }
    }
}
