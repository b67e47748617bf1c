use super::*;
use crate::weight_dsl::{parse_weight, BESSEL_J0_FIRST_ZERO};

fn w(s: &str) -> WeightExpr {
    parse_weight(s).unwrap()
}

#[test]
fn beta_of_constant_potential_is_the_squared_bessel_zero() {
    let z2 = BESSEL_J0_FIRST_ZERO * BESSEL_J0_FIRST_ZERO;
    let r = beta_constant(&w("1"), 3, 1.0).unwrap();
    assert!((r.value - 5.7832).abs() < 1e-3);
    assert!((r.value - z2).abs() < 1e-5 * z2);
    let [lo, hi] = r.bracket.unwrap();
    assert!(hi - lo <= 1e-6 * r.value);
    let cc = r.cross_check.unwrap();
    assert!(cc.agrees, "{cc:?}");
    assert!(cc.rayleigh_value >= r.value - 1e-4);
    let r = beta_constant(&w("1"), 3, BESSEL_J0_FIRST_ZERO).unwrap();
    assert!((r.value - 1.0).abs() < 1e-4);
}

#[test]
fn beta_rejects_zero_potential() {
    assert!(matches!(beta_constant(&w("0"), 3, 1.0), Err(Error::InvalidInput(_))));
}

#[test]
fn beta_is_non_increasing_in_radius() {
    let vals: Vec<f64> = [0.5, 1.0, 2.0].iter().map(|&r| beta_constant(&w("1"), 2, r).unwrap().value).collect();
    assert!(vals.windows(2).all(|v| v[1] <= v[0]));
    for (r, v) in [0.5, 1.0, 2.0].iter().zip(&vals) {
        assert!((v * r * r / vals[1] - 1.0).abs() < 1e-4);
    }
}

#[test]
fn bisection_and_rayleigh_agree() {
    for p in ["1", "pow(r,-1)"] {
        for n in [3, 4] {
            let r = beta_constant(&w(p), n, 1.0).unwrap();
            let cc = r.cross_check.unwrap();
            assert!(cc.relative_gap <= 1e-2, "P={p} n={n}: {cc:?} vs {}", r.value);
            assert!(cc.rayleigh_value >= r.value - 1e-4);
        }
    }
}

#[test]
fn hardy_quotient_approaches_the_hardy_constant() {
    let r = rayleigh_minimize(&QuadraticForm::hardy(3, 1.0), 256).unwrap();
    assert!((0.25..=0.27).contains(&r.value), "{}", r.value);
    assert!(r.eigen_residual.unwrap() < 1e-8);
    let r4 = rayleigh_minimize(&QuadraticForm::hardy(4, 1.0), 1024).unwrap();
    assert!(r4.value > 1.0 && r4.value < 1.01, "{}", r4.value);
}

#[test]
fn hardy_minimiser_norm_diverges() {
    let seq = rayleigh_sequence(&QuadraticForm::hardy(3, 1.0), 128, 2).unwrap();
    for pair in seq.windows(2) {
        assert!(pair[1].value < pair[0].value);
        let ratio = pair[1].attainment_diagnostic.unwrap() / pair[0].attainment_diagnostic.unwrap();
        assert!(ratio >= 1.2, "{ratio}");
    }
}

#[test]
fn hardy_rellich_quotient_from_above() {
    let r = rayleigh_minimize(&QuadraticForm::hardy_rellich(5, 1.0), 512).unwrap();
    assert!(r.value > 25.0 / 16.0);
    assert!(r.value < 25.0 / 16.0 * 1.03, "{}", r.value);
}

#[test]
fn quotient_is_scale_invariant() {
    let form = QuadraticForm::hardy(3, 1.0);
    let asm = assemble(&form, 128, 20.0).unwrap();
    let x: Vec<f64> = (0..asm.k.dim()).map(|i| ((i as f64) * 0.05).sin().abs() + 0.1).collect();
    let y: Vec<f64> = x.iter().map(|v| 3.7 * v).collect();
    let q = |v: &[f64]| asm.k.quad_form(v) / asm.m.quad_form(v);
    assert!((q(&x) - q(&y)).abs() <= 1e-12 * q(&x));
}

#[test]
fn rayleigh_rejects_bad_input() {
    assert!(rayleigh_minimize(&QuadraticForm::hardy(3, 1.0), 32).is_err());
    let mut f = QuadraticForm::hardy(3, 1.0);
    f.denominator = w("0 - 1");
    assert!(matches!(rayleigh_minimize(&f, 64), Err(Error::InvalidInput(_))));
}

#[test]
fn closed_form_constants() {
    assert_eq!(closed_constants(&ClosedKind::Interior, 3).unwrap(), 0.25);
    assert_eq!(closed_constants(&ClosedKind::HalfSpace, 3).unwrap(), 2.25);
    assert_eq!(closed_constants(&ClosedKind::HardyRellich, 5).unwrap(), 25.0 / 16.0);
    assert_eq!(closed_constants(&ClosedKind::BoundaryDistance, 7).unwrap(), 0.25);
    assert_eq!(closed_constants(&ClosedKind::Codimension { k: 4 }, 5).unwrap(), 1.0);
    assert!(closed_constants(&ClosedKind::Codimension { k: 2 }, 5).is_err());
    assert_eq!(closed_constants(&ClosedKind::HardySobolevExponent { s: 0.0 }, 3).unwrap(), 6.0);
    assert_eq!(closed_constants(&ClosedKind::HardySobolevExponent { s: 1.0 }, 3).unwrap(), 4.0);
    let v = closed_constants(&ClosedKind::Improvement { beta: 2.0, lambda: 1.0 }, 5).unwrap();
    assert_eq!(v, 2.0 * (25.0 + 4.0) / 4.0);
    assert!(closed_constants(&ClosedKind::Improvement { beta: 1.0, lambda: 3.0 }, 5).is_err());
}

#[test]
fn sobolev_limit_of_the_hardy_sobolev_family() {
    // S_n = π n (n-2) (Γ(n/2)/Γ(n))^{2/n}; for n = 3, Γ(3/2)/Γ(3) = √π/4.
    let s3 = 3.0 * std::f64::consts::PI * (std::f64::consts::PI.sqrt() / 4.0).powf(2.0 / 3.0);
    let r = hardy_sobolev_value(3, 0.0).unwrap();
    assert!((r.value - s3).abs() < 1e-6 * s3, "{} vs {s3}", r.value);
    assert!((r.best_t - 1.0).abs() < 1e-2);
    assert!(!r.trace.is_empty());
}

#[test]
fn hardy_sobolev_value_is_stable_under_refinement() {
    let coarse = hardy_sobolev_value_tol(3, 1.0, 1e-6).unwrap().value;
    let fine = hardy_sobolev_value_tol(3, 1.0, 1e-11).unwrap().value;
    assert!((coarse - fine).abs() < 5e-4 * fine);
}

#[test]
fn hardy_sobolev_quotient_is_homogeneous() {
    let base = hardy_sobolev_profile(3, 1.0, 1.3);
    let q1 = hardy_sobolev_quotient(3, 1.0, &base, 1e-11).unwrap();
    let q2 = hardy_sobolev_quotient(3, 1.0, |x| {
        let (lu, g) = base(x);
        (lu + 2f64.ln(), g)
    }, 1e-11)
    .unwrap();
    assert!((q1 - q2).abs() < 1e-12 * q1);
}
