use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::line::{descend, MinimizeOutcome};
use crate::error::{Error, Result};
use crate::quad::integrate_adaptive;

/// Axisymmetric function on the unit sphere, given in colatitude θ.
/// Integrals use the normalised measure `dω = ½ sin θ dθ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SphereFunction {
    /// `Σ a_k cos(kθ)`.
    Cosine { coeffs: Vec<f64> },
    /// Conformal factor of the dilation `y ↦ λy` in stereographic
    /// coordinates: `½ ln(1-τ²) - ln(1 - τ cos θ)` with `τ = (λ²-1)/(λ²+1)`.
    Dilation { lambda: f64 },
}

impl SphereFunction {
    /// Random cosine profile with `modes` decaying coefficients.
    pub fn random(seed: u64, modes: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs = (0..=modes).map(|k| rng.gen_range(-1.0..1.0) / (1.0 + k as f64)).collect();
        SphereFunction::Cosine { coeffs }
    }

    pub fn dilation(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::invalid("dilation factor must be positive"));
        }
        Ok(SphereFunction::Dilation { lambda })
    }

    /// `(u(θ), ∂_θ u(θ))`.
    pub fn eval(&self, theta: f64) -> (f64, f64) {
        match self {
            SphereFunction::Cosine { coeffs } => {
                let mut u = 0.0;
                let mut du = 0.0;
                for (k, a) in coeffs.iter().enumerate() {
                    let kf = k as f64;
                    u += a * (kf * theta).cos();
                    du -= a * kf * (kf * theta).sin();
                }
                (u, du)
            }
            SphereFunction::Dilation { lambda } => {
                let l2 = lambda * lambda;
                let tau = (l2 - 1.0) / (l2 + 1.0);
                let den = 1.0 - tau * theta.cos();
                (0.5 * (1.0 - tau * tau).ln() - den.ln(), -tau * theta.sin() / den)
            }
        }
    }

    fn integrate(&self, f: impl Fn(f64, f64, f64) -> f64) -> f64 {
        integrate_adaptive(
            |th: f64| {
                let (u, du) = self.eval(th);
                0.5 * th.sin() * f(th, u, du)
            },
            0.0,
            PI,
            1e-300,
            1e-14,
        )
        .value
    }

    /// `∫ dω` (1 by construction, up to quadrature).
    pub fn total_measure(&self) -> f64 {
        self.integrate(|_, _, _| 1.0)
    }

    /// `∫ e^{2u} cos θ dω / ∫ e^{2u} dω`; the other two moments vanish by symmetry.
    pub fn moment_residual(&self) -> f64 {
        let m = self.sup();
        self.integrate(|th, u, _| th.cos() * (2.0 * (u - m)).exp()) / self.integrate(|_, u, _| (2.0 * (u - m)).exp())
    }

    fn sup(&self) -> f64 {
        (0..=400).map(|i| self.eval(PI * i as f64 / 400.0).0).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `J_α(u) = α∫|∇u|² dω + 2∫u dω - ln ∫e^{2u} dω`.
pub fn j_alpha_sphere(u: &SphereFunction, alpha: f64) -> Result<f64> {
    let m = u.sup();
    if !m.is_finite() {
        return Err(Error::numerical("sphere profile is not finite"));
    }
    let grad = u.integrate(|_, _, du| du * du);
    let mean = u.integrate(|_, u, _| u);
    let e = u.integrate(|_, u, _| (2.0 * (u - m)).exp());
    let v = alpha * grad + 2.0 * mean - (e.ln() + 2.0 * m);
    if !v.is_finite() {
        return Err(Error::numerical("J_alpha is not finite"));
    }
    Ok(v)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AubinProbe {
    pub alpha: f64,
    pub min_estimate: f64,
    /// `Some(pass)` for `α >= 2/3`; `None` in the open range.
    pub verdict: Option<bool>,
    pub tolerance: f64,
    pub runs: Vec<MinimizeOutcome>,
}

/// Minimises `J_α` over axisymmetric functions with vanishing moments
/// (projected descent from seeded random starts).
pub fn aubin_threshold_probe(alpha: f64, budget: usize, seed: u64) -> Result<AubinProbe> {
    if !(0.5..=1.0).contains(&alpha) {
        return Err(Error::invalid(format!("the probe covers 1/2 <= alpha <= 1 (got {alpha})")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut runs = Vec::new();
    for r in 0..4 {
        let start: Vec<f64> = (0..=10)
            .map(|k| if k < 2 { 0.0 } else { rng.gen_range(-0.6..0.6) / (k as f64) * if r == 0 { 0.3 } else { 1.0 } })
            .collect();
        runs.push(descend(alpha, &start, budget)?);
    }
    let min_estimate = runs.iter().map(|r| r.inf_estimate).fold(f64::INFINITY, f64::min);
    let tolerance = if alpha >= 1.0 { 1e-4 } else { 1e-2 };
    let verdict = (alpha >= 2.0 / 3.0 - 1e-12).then_some(min_estimate >= -tolerance);
    Ok(AubinProbe { alpha, min_estimate, verdict, tolerance, runs })
}
