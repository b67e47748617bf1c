use super::*;
use crate::radial_ode::Status;
use crate::weight_dsl::{parse_weight, standard_potentials, CATALOG_J0_ZERO};
use proptest::prelude::*;

fn w(s: &str) -> WeightExpr {
    parse_weight(s).unwrap()
}

#[test]
fn hi_potential_examples() {
    assert!(is_hi_potential(&w("0"), 5.0).unwrap().is_positive());
    assert!(is_hi_potential(&w("1"), CATALOG_J0_ZERO).unwrap().is_positive());
    let c = is_hi_potential(&w("1"), 2.5).unwrap();
    assert_eq!(c.status, Status::FirstZero);
    assert!((c.zero.unwrap() - 2.4048).abs() < 1e-3);
    let p = builtin(&Builtin::InvSqLog { rho: std::f64::consts::E }).unwrap();
    assert!(is_hi_potential(&p, 1.0).unwrap().is_positive());
}

#[test]
fn non_positive_radii_are_input_errors() {
    for r in [0.0, -1.0, f64::NAN, f64::INFINITY] {
        assert!(matches!(is_hi_potential(&w("1"), r), Err(Error::InvalidInput(_))), "{r}");
        assert!(matches!(crate::best_constants::beta_constant(&w("1"), 3, r), Err(Error::InvalidInput(_))), "{r}");
    }
}

#[test]
fn hi_potential_rejects_bad_input() {
    assert!(matches!(is_hi_potential(&w("1 - r"), 2.0), Err(Error::InvalidInput(_))));
    assert!(matches!(is_hi_potential(&w("pow(r,-2)"), 1.0), Err(Error::Unsupported(_))));
}

#[test]
fn bessel_pair_examples() {
    let spec = PairSpec::new(w("1"), w("0.25/pow(r,2)"), 3, 1.0, None).unwrap();
    assert!(is_bessel_pair(&spec).unwrap().is_positive());
    for n in [1, 2, 3, 7] {
        let spec = PairSpec::new(w("1"), w("0"), n, 3.0, None).unwrap();
        assert!(is_bessel_pair(&spec).unwrap().is_positive());
    }
    // Euler oscillation: coefficient 1/4 + 0.5 exceeds the critical 1/4.
    let spec = PairSpec::new(w("1"), w("0.75/pow(r,2)"), 3, 1.0, None).unwrap();
    let c = is_bessel_pair(&spec).unwrap();
    assert_eq!(c.status, Status::FirstZero);
    assert!(c.zero.unwrap() < 1.0);
}

#[test]
fn pair_rejects_vanishing_v() {
    assert!(PairSpec::new(w("1 - r"), w("0"), 3, 2.0, None).is_err());
}

#[test]
fn shifted_pair_examples() {
    let spec = shifted_pair(0.0, 4, &w("0")).unwrap();
    assert_eq!(spec.w.ast, w("pow(r,-2)").ast);
    assert_eq!(spec.radius, 1.0);
    assert!(is_bessel_pair(&spec).unwrap().is_positive());
    let one = builtin(&Builtin::One).unwrap();
    let spec = shifted_pair(3.0, 5, &one).unwrap();
    assert!((spec.radius - CATALOG_J0_ZERO).abs() < 1e-15);
    assert!(is_bessel_pair(&spec).unwrap().is_positive());
    assert!(matches!(shifted_pair(2.0, 3, &w("0")), Err(Error::InvalidInput(_))));
}

#[test]
fn extraordinaire_examples() {
    let spec = PairSpec::new(w("1"), w("3/pow(r,2)"), 3, 1.0, None).unwrap();
    assert!(extraordinaire_check(&spec).unwrap().holds);
    let spec = PairSpec::new(w("1"), w("1/pow(r,2)"), 3, 1.0, None).unwrap();
    let c = extraordinaire_check(&spec).unwrap();
    assert!(!c.holds);
    assert!((c.violation.unwrap() - 1e-6).abs() < 1e-18);
    let spec = PairSpec::new(WeightExpr::monomial(0.0), w("0"), 3, 1.0, Some(0.0)).unwrap();
    assert!(!extraordinaire_check(&spec).unwrap().holds);
}

#[test]
fn rellich_premise_examples() {
    assert!(rellich_premise_check(&w("1"), 0.0).unwrap().holds);
    assert!(rellich_premise_check(&w("pow(r,-1)"), -1.0).unwrap().holds);
    assert!(!rellich_premise_check(&w("pow(r,-1)"), 0.0).unwrap().holds);
}

fn radii(p: &WeightExpr) -> [f64; 3] {
    if p.domain_max.is_finite() {
        let d = p.domain_max;
        [0.3 * d, 0.7 * d, d]
    } else {
        [1.0, 10.0, 100.0]
    }
}

#[test]
fn hi_and_pair_statuses_agree_on_the_catalog() {
    let mut cases = 0;
    for (name, p) in standard_potentials() {
        for radius in radii(&p) {
            let hi = is_hi_potential(&p, radius).unwrap();
            for n in [3, 4, 5] {
                let pair = is_bessel_pair(&PairSpec::hardy_shift(n, &p, radius).unwrap()).unwrap();
                assert_eq!(hi.status, pair.status, "{name} n={n} R={radius}");
                cases += 1;
            }
        }
    }
    assert!(cases >= 36);
}

#[test]
fn literal_iterated_log_is_four_times_critical() {
    // Without the 1/4 factor the k = 1 member is 4 P_rho, beyond the Hardy threshold.
    let p = builtin(&Builtin::IterLog { k: 1, rho: 1.0 }).unwrap();
    let c = is_hi_potential(&p, p.domain_max).unwrap();
    assert_eq!(c.status, Status::FirstZero);
    assert!(is_hi_potential(&p.scaled(0.25), p.domain_max).unwrap().is_positive());
}

#[test]
fn oversized_radius_breaks_both() {
    let p = builtin(&Builtin::Power { a: 1.0 }).unwrap();
    let radius = 1.2 * p.domain_max;
    assert_eq!(is_hi_potential(&p, radius).unwrap().status, Status::FirstZero);
    let pair = is_bessel_pair(&PairSpec::hardy_shift(4, &p, radius).unwrap()).unwrap();
    assert_eq!(pair.status, Status::FirstZero);
}

#[test]
fn monotone_in_radius() {
    let p = builtin(&Builtin::Power { a: 0.5 }).unwrap();
    let d = p.domain_max;
    assert!(is_hi_potential(&p, d).unwrap().is_positive());
    for f in [0.9, 0.5, 0.1, 1e-3] {
        assert!(is_hi_potential(&p, f * d).unwrap().is_positive());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]
    #[test]
    fn shifted_pairs_of_hi_potentials_certify(idx in 0usize..9, n in 3u32..7, frac in 0.0f64..=1.0) {
        let (name, p) = standard_potentials().swap_remove(idx);
        let radius = if p.domain_max.is_finite() { p.domain_max } else { 1.0 };
        prop_assume!(is_hi_potential(&p, radius).unwrap().is_positive());
        let lambda = frac * (n as f64 - 2.0);
        let spec = shifted_pair(lambda, n, &p).unwrap();
        let cert = is_bessel_pair(&spec).unwrap();
        prop_assert!(cert.is_positive(), "{} lambda={} n={}: {:?}", name, lambda, n, cert);
    }
}
