use serde::{Deserialize, Serialize};

use super::density::{wasserstein_1d, DensityGrid, Geometry};
use super::energy::{entropy_production, free_energy, EnergySpec, Internal, Potential, YoungPair};
use crate::error::{Error, Result};
use crate::verifier::CheckOutcome;

// All outcomes here are oriented as `lhs >= rhs`: `lhs` is the side the
// inequality bounds from above.

fn rounding(a: f64, b: f64) -> f64 {
    1e-12 * (1.0 + a.abs() + b.abs())
}

fn dimension(rho: &DensityGrid) -> f64 {
    match rho.geometry {
        Geometry::Line => 1.0,
        Geometry::Radial { n } => n as f64,
    }
}

/// Evaluates `f` on the given grids and on their coarsened copies; the spread
/// of the margin is the error estimate.
fn with_refinement(
    grids: &[&DensityGrid],
    f: impl Fn(&[&DensityGrid]) -> Result<(f64, f64)>,
) -> Result<CheckOutcome> {
    let (big, small) = f(grids)?;
    let coarse: Option<Vec<DensityGrid>> = grids.iter().map(|g| g.coarsened()).collect();
    let spread = match coarse {
        Some(c) => {
            let refs: Vec<&DensityGrid> = c.iter().collect();
            match f(&refs) {
                Ok((b2, s2)) if (b2 - s2).is_finite() => ((big - small) - (b2 - s2)).abs(),
                _ => 0.0,
            }
        }
        None => 0.0,
    };
    let spread = if spread.is_finite() { spread } else { 0.0 };
    Ok(CheckOutcome::from_values(big, small, spread + rounding(big, small)))
}

fn require_line(rho: &DensityGrid) -> Result<()> {
    if rho.geometry != Geometry::Line {
        return Err(Error::Unsupported("this check is implemented for line geometry only".into()));
    }
    Ok(())
}

/// `x·∇W` doubled, as a convolution kernel.
fn doubled_virial(w: &Potential) -> Potential {
    match *w {
        Potential::Zero => Potential::Zero,
        // 2 x · k x = 4 (k/2 x²)
        Potential::Quadratic { stiffness, .. } => Potential::Quadratic { stiffness: 4.0 * stiffness, center: 0.0 },
    }
}

/// Comparison inequality between the total energies of `ρ₀` and `ρ₁`:
///
/// `H_{V+c}(ρ₀) - H_{V+c}(ρ₁) + (λ+ν)/2 W₂² - ν/2 |b₀-b₁|²
///    <= ∫[-n P_F(ρ₀) + ρ₀ (c + x·∇V)] + ½∫ρ₀ ((2x·∇W) ⋆ ρ₀) + I_{c*}(ρ₀|ρ_V)`.
pub fn check_master_inequality(
    rho0: &DensityGrid,
    rho1: &DensityGrid,
    spec: &EnergySpec,
    young: &YoungPair,
    lambda: f64,
) -> Result<CheckOutcome> {
    require_line(rho0)?;
    require_line(rho1)?;
    spec.validate()?;
    if let Potential::Quadratic { center, .. } = spec.interaction {
        if center != 0.0 {
            return Err(Error::Unsupported("interaction potentials must be centred at 0".into()));
        }
    }
    let nu = spec.nu();
    let shifted = |s: &EnergySpec| EnergySpec { confinement: Potential::Zero, interaction: s.interaction, internal: s.internal };
    with_refinement(&[rho0, rho1], |g| {
        let (r0, r1) = (g[0], g[1]);
        let base = shifted(spec);
        let energy = |r: &DensityGrid| -> Result<f64> {
            let fe = free_energy(r, &base)?;
            let pot = r.integrate(|x, v| v * (spec.confinement.eval(x) + young.c(x)));
            Ok(fe.internal + fe.interaction + pot)
        };
        let w2 = wasserstein_1d(r0, r1)?.value;
        let db = r0.barycenter() - r1.barycenter();
        let lhs = energy(r0)? - energy(r1)? + 0.5 * (lambda + nu) * w2 * w2 - 0.5 * nu * db * db;

        let n = dimension(r0);
        let modified = EnergySpec {
            internal: spec.internal,
            confinement: Potential::Zero,
            interaction: doubled_virial(&spec.interaction),
        };
        let inter = free_energy(r0, &modified)?.interaction;
        let rest = r0.integrate(|x, v| -n * spec.internal.pressure(v) + v * (young.c(x) + x * spec.confinement.derivative(x)));
        let prod = entropy_production(r0, spec, young)?.value;
        Ok((rest + inter + prod, lhs))
    })
}

/// Where the constant of the energy-entropy inequality came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyEntropyOutcome {
    pub outcome: CheckOutcome,
    pub k_c: f64,
    pub k_c_source: String,
}

/// `K_c = -(n/2) log(2πσ)` for `F = x log x` with `c = |x|²/(2σ)`.
pub fn gaussian_log_sobolev_constant(n: u32, sigma: f64) -> f64 {
    -0.5 * n as f64 * (2.0 * std::f64::consts::PI * sigma).ln()
}

/// `∫[F(ρ) + n P_F(ρ)] <= ∫ρ c*(-∇(F'∘ρ)) + K_c`.
pub fn check_energy_entropy(
    rho: &DensityGrid,
    internal: Internal,
    young: &YoungPair,
    k_c: Option<f64>,
) -> Result<EnergyEntropyOutcome> {
    let n = dimension(rho);
    let (k_c, source) = match (k_c, internal, young) {
        (Some(k), _, _) => (k, "supplied by caller".to_string()),
        (None, Internal::Entropy, YoungPair::Quadratic { sigma }) => (
            gaussian_log_sobolev_constant(n as u32, *sigma),
            "Gaussian log-Sobolev constant -(n/2) log(2 pi sigma)".to_string(),
        ),
        _ => return Err(Error::Unsupported("K_c must be supplied for this (F, c) pair".into())),
    };
    let spec = EnergySpec::new(internal, Potential::Zero, Potential::Zero)?;
    let outcome = with_refinement(&[rho], |g| {
        let r = g[0];
        let lhs = r.integrate(|_, v| internal.f(v) + n * internal.pressure(v));
        let prod = entropy_production(r, &spec, young)?.value;
        Ok((prod + k_c, lhs))
    })?;
    Ok(EnergyEntropyOutcome { outcome, k_c, k_c_source: source })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HwbiMode {
    Hwbi,
    Hwi,
    Talagrand,
    LogSobolev,
}

impl std::str::FromStr for HwbiMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "hwbi" => HwbiMode::Hwbi,
            "hwi" => HwbiMode::Hwi,
            "talagrand" => HwbiMode::Talagrand,
            "log_sobolev" | "log-sobolev" => HwbiMode::LogSobolev,
            _ => return Err(Error::invalid(format!("unknown mode `{s}`"))),
        })
    }
}

/// HWBI and its corollaries; `ρ₁` plays the role of the reference density
/// (take `ρ₁ = ρ_V` for the Talagrand and log-Sobolev modes).
///
/// * hwbi: `H(ρ₀|ρ₁) <= W₂ √I₂ - (μ+ν)/2 W₂² + ν/2 |b₀-b₁|²`
/// * hwi: the same with `ν = 0` and `W = 0`
/// * talagrand: `W₂² <= (2/μ) H(ρ₀|ρ₁)`
/// * log_sobolev: `H(ρ₀|ρ₁) <= I₂ / (2μ)`
pub fn check_hwbi(rho0: &DensityGrid, rho1: &DensityGrid, spec: &EnergySpec, mode: HwbiMode) -> Result<CheckOutcome> {
    require_line(rho0)?;
    require_line(rho1)?;
    spec.validate()?;
    let (mu, nu) = (spec.mu(), spec.nu());
    if mode != HwbiMode::Hwbi && !spec.interaction.is_zero() {
        return Err(Error::Unsupported(format!("{mode:?} mode is the W = 0 corollary; interaction must vanish")));
    }
    if matches!(mode, HwbiMode::Talagrand | HwbiMode::LogSobolev) && !(mu > 0.0) {
        return Err(Error::invalid(format!("{mode:?} mode needs a uniformly convex confinement (mu = {mu})")));
    }
    let quad = YoungPair::Quadratic { sigma: 2.0 };
    let out = with_refinement(&[rho0, rho1], |g| {
        let (r0, r1) = (g[0], g[1]);
        let h = free_energy(r0, spec)?.total - free_energy(r1, spec)?.total;
        let w2 = wasserstein_1d(r0, r1)?.value;
        // c* = |y|² with σ = 2 gives I₂ = ∫ρ|∇ψ|².
        let i2 = || entropy_production(r0, spec, &quad).map(|p| p.value);
        Ok(match mode {
            HwbiMode::Hwbi | HwbiMode::Hwi => {
                let db = r0.barycenter() - r1.barycenter();
                (if w2 == 0.0 { 0.0 } else { w2 * i2()?.sqrt() } - 0.5 * (mu + nu) * w2 * w2 + 0.5 * nu * db * db, h)
            }
            HwbiMode::Talagrand => (2.0 / mu * h, w2 * w2),
            HwbiMode::LogSobolev => (i2()? / (2.0 * mu), h),
        })
    })?;
    Ok(if mode == HwbiMode::Hwbi && mu + nu <= 0.0 {
        out.with_note("mu + nu <= 0: the quadratic term does not help; bound may be vacuous")
    } else {
        out
    })
}
