use std::f64::consts::PI;

use proptest::prelude::*;

use super::*;

const NODES: usize = 4001;

fn gauss(m: f64, s: f64) -> DensityGrid {
    DensityGrid::gaussian(m, s, NODES).unwrap()
}

/// `H(N(m,s²) | N(0,1))` for `F = x log x`, `V = x²/2`.
fn gaussian_relative_entropy(m: f64, s: f64) -> f64 {
    0.5 * (m * m + s * s - 1.0 - 2.0 * s.ln())
}

/// `∫ρ|∇(log ρ + x²/2)|²` at `N(m, s²)`.
fn gaussian_fisher(m: f64, s: f64) -> f64 {
    m * m + (s - 1.0 / s).powi(2)
}

#[test]
fn quadratic_is_self_dual() {
    let f = GridFunction::sample(-5.0, 5.0, 2001, |x| 0.5 * x * x).unwrap();
    let ys: Vec<f64> = (0..41).map(|i| -2.0 + 0.1 * i as f64).collect();
    let g = legendre_on(&f, &ys).unwrap();
    for (y, v) in ys.iter().zip(&g.values) {
        assert!((v - 0.5 * y * y).abs() < 1e-5, "{y} {v}");
    }
}

#[test]
fn flat_function_conjugates_to_absolute_value() {
    let f = GridFunction::sample(-1.0, 1.0, 101, |_| 0.0).unwrap();
    let ys: Vec<f64> = (0..21).map(|i| -3.0 + 0.3 * i as f64).collect();
    let g = legendre_on(&f, &ys).unwrap();
    for (y, v) in ys.iter().zip(&g.values) {
        assert!((v - y.abs()).abs() < 1e-12);
    }
    assert!(GridFunction::new(vec![], vec![]).is_err());
}

#[test]
fn biconjugation_recovers_convex_functions() {
    for f in [
        GridFunction::sample(-2.0, 2.0, 801, |x| x * x * x * x / 4.0 + x).unwrap(),
        GridFunction::sample(-2.0, 2.0, 801, |x: f64| x.abs()).unwrap(),
        GridFunction::sample(-2.0, 2.0, 801, |x: f64| x.exp()).unwrap(),
    ] {
        let star = legendre(&f).unwrap();
        let back = legendre_on(&star, &f.xs).unwrap();
        let bound = 2.0 * f.max_spacing() * f.lipschitz();
        let err = f.values.iter().zip(&back.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err <= bound, "{err} > {bound}");
    }
}

#[test]
fn biconjugate_of_nonconvex_is_its_hull() {
    let f = GridFunction::sample(-2.0, 2.0, 401, |x| (x * x - 1.0).powi(2)).unwrap();
    let back = legendre_on(&legendre(&f).unwrap(), &f.xs).unwrap();
    for (x, v) in f.xs.iter().zip(&back.values) {
        if x.abs() <= 1.0 {
            assert!(v.abs() < 1e-3, "{x} {v}");
        }
    }
}

#[test]
fn wasserstein_identity_and_translation() {
    let a = gauss(0.3, 1.2);
    assert!(wasserstein_1d(&a, &a).unwrap().value < 1e-12);
    let b = gauss(1.05, 1.2);
    let w = wasserstein_1d(&a, &b).unwrap();
    assert!((w.value - 0.75).abs() < 1e-6, "{w:?}");
}

#[test]
fn wasserstein_between_gaussians() {
    for (m0, s0, m1, s1) in [(0.0, 1.0, 1.0, 2.0), (-1.0, 0.5, 0.5, 0.8), (2.0, 3.0, 2.0, 1.0)] {
        let w = wasserstein_1d(&gauss(m0, s0), &gauss(m1, s1)).unwrap();
        let oracle = ((m0 - m1) * (m0 - m1) + (s0 - s1) * (s0 - s1)).sqrt();
        assert!((w.value - oracle).abs() < 1e-4, "{} vs {oracle}", w.value);
        assert!(w.error < 1e-4);
    }
}

#[test]
fn wasserstein_rejects_mismatched_inputs() {
    let a = gauss(0.0, 1.0);
    let radial = DensityGrid::from_fn(Geometry::Radial { n: 3 }, 0.0, 5.0, 101, |r| (-r * r).exp()).unwrap();
    assert!(wasserstein_1d(&a, &radial).is_err());
    let mut heavy = gauss(0.0, 1.0);
    heavy.values.iter_mut().for_each(|v| *v *= 1.5);
    assert!(wasserstein_1d(&a, &heavy).is_err());
}

fn sample_densities() -> Vec<DensityGrid> {
    vec![
        gauss(0.0, 1.0),
        gauss(1.0, 0.5),
        gauss(-2.0, 2.0),
        DensityGrid::from_fn(Geometry::Line, -1.0, 1.0, NODES, |x| 1.0 - x * x).unwrap(),
        DensityGrid::from_fn(Geometry::Line, 0.0, 4.0, NODES, |x| x * (4.0 - x).powi(2)).unwrap(),
        DensityGrid::from_fn(Geometry::Line, -3.0, 3.0, NODES, |x| (-x.abs()).exp() * (1.0 + 0.5 * (3.0 * x).sin())).unwrap(),
    ]
}

#[test]
fn wasserstein_metric_axioms() {
    let ds = sample_densities();
    let w = |a: &DensityGrid, b: &DensityGrid| wasserstein_1d(a, b).unwrap().value;
    for a in &ds {
        assert!(w(a, a) < 1e-10);
        for b in &ds {
            assert!((w(a, b) - w(b, a)).abs() <= 1e-10);
            for c in &ds {
                assert!(w(a, c) <= w(a, b) + w(b, c) + 1e-8);
            }
        }
    }
}

#[test]
fn push_forward_identities() {
    let a = gauss(0.0, 1.0);
    let id = a.nodes();
    assert!(push_forward_check(&id, &a, &a).unwrap().max < 1e-12);

    let b = gauss(0.7, 1.0);
    let shift: Vec<f64> = id.iter().map(|x| x + 0.7).collect();
    let r = push_forward_check(&shift, &a, &b).unwrap();
    assert!(r.residuals[1] < 1e-10, "{:?}", r.residuals);

    let c = DensityGrid::from_fn(Geometry::Line, -1.0, 1.0, NODES, |x| 1.0 - x * x).unwrap();
    let map = monotone_map(&a, &c);
    let r = push_forward_check(&map, &a, &c).unwrap();
    assert!(r.residuals[2] <= 1e-6, "{:?}", r.residuals);

    let bad: Vec<f64> = id.iter().map(|x| -x).collect();
    assert!(push_forward_check(&bad, &a, &a).is_err());
}

#[test]
fn free_energy_components() {
    let u = DensityGrid::from_fn(Geometry::Line, 0.0, 1.0, 101, |_| 1.0).unwrap();
    let fe = free_energy(&u, &EnergySpec::gaussian()).unwrap();
    assert!(fe.internal.abs() < 1e-14);
    assert_eq!(fe.interaction, 0.0);

    let g = gauss(0.0, 1.0);
    let fe = free_energy(&g, &EnergySpec::gaussian()).unwrap();
    assert!((fe.potential - 0.5).abs() < 1e-3);
    assert!((fe.internal + 0.5 * (2.0 * PI * std::f64::consts::E).ln()).abs() < 1e-9);

    let with_w = EnergySpec::new(Internal::Entropy, Potential::quadratic(1.0), Potential::quadratic(1.0)).unwrap();
    let fe = free_energy(&gauss(0.4, 1.0), &with_w).unwrap();
    // ½∫∫ (x-y)²/2 ρρ = variance / 2
    assert!((fe.interaction - 0.5).abs() < 1e-9, "{}", fe.interaction);
}

#[test]
fn uneven_interaction_rejected() {
    let w = Potential::Quadratic { stiffness: 1.0, center: 0.5 };
    assert!(EnergySpec::new(Internal::Entropy, Potential::Zero, w).is_err());
}

#[test]
fn entropy_production_examples() {
    let spec = EnergySpec::gaussian();
    let q = YoungPair::quadratic(2.0).unwrap();
    let stationary = entropy_production(&gauss(0.0, 1.0), &spec, &q).unwrap();
    assert!(stationary.value.abs() < 1e-4);

    let shifted = entropy_production(&gauss(0.5, 1.0), &spec, &q).unwrap();
    assert!((shifted.value - 0.25).abs() < 1e-3);

    let rho = gauss(0.3, 1.4);
    let base = entropy_production(&rho, &spec, &YoungPair::quadratic(1.0).unwrap()).unwrap().value;
    for sigma in [0.5, 2.0, 3.0] {
        let v = entropy_production(&rho, &spec, &YoungPair::quadratic(sigma).unwrap()).unwrap().value;
        assert!((v - sigma * base).abs() <= 1e-12 * v.abs());
    }
    assert!((2.0 * base - gaussian_fisher(0.3, 1.4)).abs() < 1e-6);
}

#[test]
fn entropy_production_reports_jumps_and_masks() {
    let u = DensityGrid::from_fn(Geometry::Line, -1.0, 2.0, 301, |x| if (0.0..=1.0).contains(&x) { 1.0 } else { 0.0 })
        .unwrap();
    let p = entropy_production(&u, &EnergySpec::gaussian(), &YoungPair::quadratic(1.0).unwrap()).unwrap();
    assert!(p.infinite && p.masked > 0);
}

#[test]
fn entropy_production_is_nonnegative() {
    let q = YoungPair::quadratic(1.0).unwrap();
    for d in sample_densities() {
        for spec in [EnergySpec::gaussian(), EnergySpec::new(Internal::Power { gamma: 1.5 }, Potential::quadratic(2.0), Potential::Zero).unwrap()] {
            assert!(entropy_production(&d, &spec, &q).unwrap().value >= 0.0);
        }
    }
}

#[test]
fn young_pairs_are_consistent() {
    for y in [YoungPair::quadratic(0.5).unwrap(), YoungPair::quadratic(2.0).unwrap(), YoungPair::Power { p: 3.0 }] {
        let (young, gap) = y.verify(3.0, 601).unwrap();
        assert!(young <= 1e-12, "{young}");
        assert!(gap < 1e-3, "{y:?} {gap}");
    }
}

#[test]
fn master_inequality_at_the_stationary_state() {
    let rho = gauss(0.0, 1.0);
    let q = YoungPair::quadratic(1.0).unwrap();
    let c = check_master_inequality(&rho, &rho, &EnergySpec::gaussian(), &q, 1.0).unwrap();
    assert!(c.rhs.abs() < 1e-12, "{c:?}");
    assert!(c.lhs >= 0.0 && c.pass);
}

#[test]
fn master_inequality_on_gaussian_pairs() {
    let spec = EnergySpec::gaussian();
    for sigma in [0.5, 1.0, 2.0] {
        let q = YoungPair::quadratic(sigma).unwrap();
        for (a, b) in [((0.5, 1.0), (0.0, 1.0)), ((1.0, 0.6), (-0.5, 1.5)), ((0.0, 2.0), (0.0, 1.0))] {
            let c = check_master_inequality(&gauss(a.0, a.1), &gauss(b.0, b.1), &spec, &q, 1.0).unwrap();
            assert!(c.pass, "sigma {sigma} {a:?} {b:?} {c:?}");
        }
    }
}

#[test]
fn master_inequality_with_power_energy_and_interaction() {
    let bump = |c: f64, w: f64| {
        DensityGrid::from_fn(Geometry::Line, c - 1.5 * w, c + 1.5 * w, NODES, move |x| (1.0 - ((x - c) / w).powi(2)).max(0.0).powi(2)).unwrap()
    };
    let spec = EnergySpec::new(Internal::Power { gamma: 1.5 }, Potential::quadratic(1.0), Potential::quadratic(0.5)).unwrap();
    let q = YoungPair::quadratic(1.0).unwrap();
    let c = check_master_inequality(&bump(0.2, 1.0), &bump(-0.3, 0.7), &spec, &q, 1.0).unwrap();
    assert!(c.pass, "{c:?}");
    let radial = DensityGrid::from_fn(Geometry::Radial { n: 3 }, 0.0, 4.0, 101, |r| (-r * r).exp()).unwrap();
    assert!(matches!(check_master_inequality(&radial, &radial, &spec, &q, 1.0), Err(crate::Error::Unsupported(_))));
}

#[test]
fn energy_entropy_examples() {
    for sigma in [0.5, 1.0, 2.0] {
        let q = YoungPair::quadratic(sigma).unwrap();
        let g = gauss(0.3, sigma.sqrt());
        let e = check_energy_entropy(&g, Internal::Entropy, &q, None).unwrap();
        assert!((e.outcome.margin).abs() < 1e-3, "{e:?}");
        assert!(e.outcome.pass);
        assert!((e.k_c - gaussian_log_sobolev_constant(1, sigma)).abs() < 1e-15);
    }
    let q = YoungPair::quadratic(1.0).unwrap();
    let perturbed = DensityGrid::from_fn(Geometry::Line, -12.0, 12.0, NODES, |x| (-0.5 * x * x).exp() * (1.0 + 0.1 * x.sin())).unwrap();
    let e = check_energy_entropy(&perturbed, Internal::Entropy, &q, None).unwrap();
    assert!(e.outcome.margin > 10.0 * e.outcome.error, "{e:?}");

    let uniform = DensityGrid::from_fn(Geometry::Line, -1.0, 2.0, 301, |x| if (0.0..=1.0).contains(&x) { 1.0 } else { 0.0 }).unwrap();
    assert!(check_energy_entropy(&uniform, Internal::Entropy, &q, None).unwrap().outcome.pass);

    assert!(check_energy_entropy(&perturbed, Internal::Power { gamma: 2.0 }, &q, None).is_err());
    let supplied = check_energy_entropy(&perturbed, Internal::Power { gamma: 2.0 }, &q, Some(1.0)).unwrap();
    assert_eq!(supplied.k_c_source, "supplied by caller");
}

#[test]
fn energy_entropy_radial_gaussian() {
    // Equality for the radial Gaussian with covariance σ I in R^3.
    let sigma = 0.8f64;
    let g = DensityGrid::from_fn(Geometry::Radial { n: 3 }, 0.0, 12.0 * sigma.sqrt(), NODES, |r| (-0.5 * r * r / sigma).exp()).unwrap();
    let e = check_energy_entropy(&g, Internal::Entropy, &YoungPair::quadratic(sigma).unwrap(), None).unwrap();
    assert!(e.outcome.margin.abs() < 1e-3, "{e:?}");
}

#[test]
fn log_sobolev_equality_for_translates() {
    let spec = EnergySpec::gaussian();
    let c = check_hwbi(&gauss(0.8, 1.0), &gauss(0.0, 1.0), &spec, HwbiMode::LogSobolev).unwrap();
    assert!((c.rhs - 0.32).abs() < 1e-3 && (c.lhs - 0.32).abs() < 1e-3, "{c:?}");
    assert!(c.pass);
}

#[test]
fn talagrand_strict_for_dilations() {
    let spec = EnergySpec::gaussian();
    let c = check_hwbi(&gauss(0.0, 1.5), &gauss(0.0, 1.0), &spec, HwbiMode::Talagrand).unwrap();
    assert!((c.rhs - 0.25).abs() < 1e-4);
    assert!((c.lhs - 2.0 * gaussian_relative_entropy(0.0, 1.5)).abs() < 1e-6);
    assert!(c.margin > 0.0 && c.pass);
}

#[test]
fn all_modes_vanish_on_identical_densities() {
    let spec = EnergySpec::gaussian();
    let d = DensityGrid::from_fn(Geometry::Line, -4.0, 4.0, 801, |x| (-x * x).exp() * (2.0 + x.cos())).unwrap();
    for mode in [HwbiMode::Hwbi, HwbiMode::Hwi, HwbiMode::Talagrand, HwbiMode::LogSobolev] {
        let c = check_hwbi(&d, &d, &spec, mode).unwrap();
        assert!(c.pass, "{mode:?} {c:?}");
        assert!(c.rhs.abs() < 1e-12);
    }
}

#[test]
fn hwbi_with_interaction_and_vacuous_flag() {
    let spec = EnergySpec::new(Internal::Entropy, Potential::quadratic(1.0), Potential::quadratic(0.5)).unwrap();
    let c = check_hwbi(&gauss(0.5, 0.8), &gauss(0.0, 1.0), &spec, HwbiMode::Hwbi).unwrap();
    assert!(c.pass, "{c:?}");
    let flat = EnergySpec::new(Internal::Entropy, Potential::Zero, Potential::Zero).unwrap();
    let c = check_hwbi(&gauss(0.5, 0.8), &gauss(0.0, 1.0), &flat, HwbiMode::Hwbi).unwrap();
    assert!(c.note.is_some());
    assert!(check_hwbi(&gauss(0.5, 0.8), &gauss(0.0, 1.0), &spec, HwbiMode::Talagrand).is_err());
}

#[test]
fn gaussian_closed_forms_match_quadrature() {
    let spec = EnergySpec::gaussian();
    let reference = free_energy(&gauss(0.0, 1.0), &spec).unwrap().total;
    let q = YoungPair::quadratic(2.0).unwrap();
    for (m, s) in [(0.0, 1.0), (1.2, 0.7), (-0.4, 2.5)] {
        let g = gauss(m, s);
        let h = free_energy(&g, &spec).unwrap().total - reference;
        assert!((h - gaussian_relative_entropy(m, s)).abs() < 1e-9);
        let i = entropy_production(&g, &spec, &q).unwrap().value;
        assert!((i - gaussian_fisher(m, s)).abs() < 1e-6 * (1.0 + i));
    }
}

#[test]
fn talagrand_and_log_sobolev_on_a_gaussian_grid() {
    let spec = EnergySpec::gaussian();
    let reference = gauss(0.0, 1.0);
    for i in 0..10 {
        for j in 0..10 {
            let m = -2.0 + 4.0 * i as f64 / 9.0;
            let s = 0.3 + 2.7 * j as f64 / 9.0;
            let g = DensityGrid::gaussian(m, s, 2001).unwrap();
            for mode in [HwbiMode::Talagrand, HwbiMode::LogSobolev] {
                let c = check_hwbi(&g, &reference, &spec, mode).unwrap();
                assert!(c.pass, "{mode:?} m={m} s={s} {c:?}");
            }
        }
    }
}

#[test]
fn sobolev_duality_closes() {
    for n in [3u32, 4] {
        let d = sobolev_duality_gap(n, 0.05, 20.0).unwrap();
        assert!(d.gap.abs() / d.inf_side <= 1e-2, "{d:?}");
        for (_, sup, inf) in &d.samples {
            assert!(*sup <= inf * (1.0 + 1e-2));
        }
        let nf = n as f64;
        let gamma_ratio: f64 = if n == 3 { PI.sqrt() / 4.0 } else { 1.0 / 6.0 };
        let sobolev = PI * nf * (nf - 2.0) * gamma_ratio.powf(2.0 / nf);
        assert!((d.inf_side - sobolev).abs() < 1e-8 * sobolev, "{} vs {sobolev}", d.inf_side);
    }
    assert!(sobolev_duality_gap(2, 0.1, 10.0).is_err());
}

#[test]
fn inf_side_is_scale_invariant() {
    let a = sobolev_inf_side(3, 1.0).unwrap();
    for t in [0.1, 0.5, 3.0, 7.0] {
        assert!((sobolev_inf_side(3, t).unwrap() - a).abs() < 1e-10 * a);
    }
}

#[test]
fn yamabe_profile_is_a_solution() {
    for n in [3u32, 4, 5] {
        let (kappa, dev) = yamabe_check(n).unwrap();
        assert!((kappa - (n * (n - 2)) as f64).abs() < 1e-9, "{kappa}");
        assert!(dev < 1e-10);
    }
}

#[test]
fn density_csv_round_trip() {
    let g = DensityGrid::gaussian(0.0, 1.0, 101).unwrap();
    let h = DensityGrid::from_csv(&g.to_csv(), Geometry::Line).unwrap();
    assert!((g.quantile(0.3) - h.quantile(0.3)).abs() < 1e-10);
    assert!(DensityGrid::from_csv("x,rho\n0,1\n1,1\n3,1\n", Geometry::Line).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn normalisation_and_quantile_inverse(scale in 0.1f64..10.0, a in -3.0f64..3.0, w in 0.5f64..4.0) {
        let d = DensityGrid::from_fn(Geometry::Line, a, a + w, 201, |x| scale * (1.0 + (x - a).sin().powi(2))).unwrap();
        prop_assert!((d.mass() - 1.0).abs() <= MASS_TOL);
        for i in 0..d.len() {
            let x = d.quantile(d.cdf()[i]);
            prop_assert!((x - d.node(i)).abs() <= 1e-9 * (1.0 + x.abs()));
        }
    }
}
