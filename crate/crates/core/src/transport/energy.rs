use serde::{Deserialize, Serialize};

use super::density::{DensityGrid, Geometry};
use super::legendre::{legendre_on, GridFunction};
use crate::error::{Error, Result};

/// Internal energy density `F`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Internal {
    /// `x log x` with `0 log 0 = 0`.
    Entropy,
    /// `x^gamma`.
    Power { gamma: f64 },
}

impl Internal {
    pub fn f(&self, x: f64) -> f64 {
        match *self {
            Internal::Entropy => {
                if x > 0.0 {
                    x * x.ln()
                } else {
                    0.0
                }
            }
            Internal::Power { gamma } => x.powf(gamma),
        }
    }

    pub fn df(&self, x: f64) -> f64 {
        match *self {
            Internal::Entropy => x.ln() + 1.0,
            Internal::Power { gamma } => {
                if x > 0.0 {
                    gamma * x.powf(gamma - 1.0)
                } else if gamma > 1.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// Pressure `x F'(x) - F(x)`.
    pub fn pressure(&self, x: f64) -> f64 {
        match *self {
            Internal::Entropy => x,
            Internal::Power { gamma } => (gamma - 1.0) * x.powf(gamma),
        }
    }
}

/// Potentials on the line (or in `|x|` for radial densities).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Potential {
    Zero,
    /// `k/2 (x - c)²`, convexity modulus `k`.
    Quadratic { stiffness: f64, center: f64 },
}

impl Potential {
    pub fn quadratic(stiffness: f64) -> Self {
        Potential::Quadratic { stiffness, center: 0.0 }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Potential::Zero => 0.0,
            Potential::Quadratic { stiffness, center } => 0.5 * stiffness * (x - center).powi(2),
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match *self {
            Potential::Zero => 0.0,
            Potential::Quadratic { stiffness, center } => stiffness * (x - center),
        }
    }

    pub fn modulus(&self) -> f64 {
        match *self {
            Potential::Zero => 0.0,
            Potential::Quadratic { stiffness, .. } => stiffness,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Potential::Zero) || self.modulus() == 0.0 && self.eval(1.0) == 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergySpec {
    pub internal: Internal,
    pub confinement: Potential,
    pub interaction: Potential,
}

impl EnergySpec {
    pub fn new(internal: Internal, confinement: Potential, interaction: Potential) -> Result<Self> {
        let s = EnergySpec { internal, confinement, interaction };
        s.validate()?;
        Ok(s)
    }

    /// Gaussian setting: entropy, `V = |x|²/2`, no interaction.
    pub fn gaussian() -> Self {
        EnergySpec { internal: Internal::Entropy, confinement: Potential::quadratic(1.0), interaction: Potential::Zero }
    }

    pub fn mu(&self) -> f64 {
        self.confinement.modulus()
    }

    pub fn nu(&self) -> f64 {
        self.interaction.modulus()
    }

    /// `W` even on samples and `P_F` consistent with `F'` by central differences.
    pub fn validate(&self) -> Result<()> {
        for i in 1..=50 {
            let x = 0.2 * i as f64;
            let (a, b) = (self.interaction.eval(x), self.interaction.eval(-x));
            if (a - b).abs() > 1e-12 * (1.0 + a.abs()) {
                return Err(Error::invalid(format!("interaction potential is not even: W({x}) = {a}, W(-{x}) = {b}")));
            }
        }
        if let Internal::Power { gamma } = self.internal {
            if !(gamma > 0.0) || gamma == 1.0 {
                return Err(Error::invalid(format!("power internal energy needs gamma > 0, gamma != 1 (got {gamma})")));
            }
        }
        for i in 1..=20 {
            let x = 0.25 * i as f64;
            let h = 1e-5 * x;
            let fd = (self.internal.f(x + h) - self.internal.f(x - h)) / (2.0 * h);
            let p = x * fd - self.internal.f(x);
            if (p - self.internal.pressure(x)).abs() > 1e-6 * (1.0 + p.abs()) {
                return Err(Error::numerical(format!("pressure inconsistent with F' at x = {x}")));
            }
        }
        Ok(())
    }
}

/// Young function `c` with its conjugate `c*`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum YoungPair {
    /// `c(x) = |x|²/(2σ)`, `c*(y) = σ|y|²/2`.
    Quadratic { sigma: f64 },
    /// `c(x) = |x|^p / p`, `c*(y) = |y|^q / q`.
    Power { p: f64 },
}

impl YoungPair {
    pub fn quadratic(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::invalid("sigma must be positive"));
        }
        Ok(YoungPair::Quadratic { sigma })
    }

    pub fn c(&self, x: f64) -> f64 {
        match *self {
            YoungPair::Quadratic { sigma } => x * x / (2.0 * sigma),
            YoungPair::Power { p } => x.abs().powf(p) / p,
        }
    }

    pub fn c_star(&self, y: f64) -> f64 {
        match *self {
            YoungPair::Quadratic { sigma } => 0.5 * sigma * y * y,
            YoungPair::Power { p } => {
                let q = p / (p - 1.0);
                y.abs().powf(q) / q
            }
        }
    }

    /// Largest violation of `x y <= c(x) + c*(y)` on a square grid, and the
    /// largest gap between `c*` and the discrete Legendre transform of `c`.
    pub fn verify(&self, half_width: f64, points: usize) -> Result<(f64, f64)> {
        if let YoungPair::Power { p } = *self {
            if !(p > 1.0) {
                return Err(Error::invalid("power Young functions need p > 1"));
            }
        }
        let cg = GridFunction::sample(-half_width, half_width, points, |x| self.c(x))?;
        let mut young = 0.0f64;
        for &x in &cg.xs {
            for &y in &cg.xs {
                young = young.max(x * y - self.c(x) - self.c_star(y));
            }
        }
        // Only slopes attained inside the grid are reproducible.
        let slope = self.c(half_width) / half_width;
        let ys: Vec<f64> = (0..points).map(|i| -slope + 2.0 * slope * i as f64 / (points - 1) as f64).collect();
        let cs = legendre_on(&cg, &ys)?;
        let gap = ys.iter().zip(&cs.values).map(|(&y, &v)| (v - self.c_star(y)).abs()).fold(0.0, f64::max);
        Ok((young, gap))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreeEnergy {
    pub internal: f64,
    pub potential: f64,
    pub interaction: f64,
    pub total: f64,
}

/// `(W ⋆ ρ)` at the nodes by direct summation.
pub fn convolve(rho: &DensityGrid, w: &Potential) -> Vec<f64> {
    let n = rho.len();
    if w.is_zero() {
        return vec![0.0; n];
    }
    let h = rho.spacing();
    let xs = rho.nodes();
    xs.iter()
        .map(|&x| {
            let mut s = 0.0;
            for (j, (&y, &r)) in xs.iter().zip(&rho.values).enumerate() {
                let wt = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
                s += wt * w.eval(x - y) * r;
            }
            s * h
        })
        .collect()
}

fn interaction_supported(rho: &DensityGrid, spec: &EnergySpec) -> Result<()> {
    if !spec.interaction.is_zero() && rho.geometry != Geometry::Line {
        return Err(Error::Unsupported("interaction energies are implemented on the line only".into()));
    }
    Ok(())
}

/// `H^F`, `H_V`, `H^W` and their sum.
pub fn free_energy(rho: &DensityGrid, spec: &EnergySpec) -> Result<FreeEnergy> {
    interaction_supported(rho, spec)?;
    let internal = rho.integrate(|_, r| spec.internal.f(r));
    let potential = rho.integrate(|x, r| r * spec.confinement.eval(x));
    let interaction = if spec.interaction.is_zero() {
        0.0
    } else {
        let conv = convolve(rho, &spec.interaction);
        let h = rho.spacing();
        let n = rho.len();
        0.5 * h
            * conv
                .iter()
                .zip(&rho.values)
                .enumerate()
                .map(|(i, (c, r))| if i == 0 || i == n - 1 { 0.5 } else { 1.0 } * c * r)
                .sum::<f64>()
    };
    if !internal.is_finite() {
        return Err(Error::numerical("internal energy is not finite"));
    }
    Ok(FreeEnergy { internal, potential, interaction, total: internal + potential + interaction })
}

/// Entropy production with bookkeeping of nodes where the density vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyProduction {
    pub value: f64,
    /// Nodes with zero density, excluded from the gradient.
    pub masked: usize,
    /// True when the density jumps to zero, making the production infinite.
    pub infinite: bool,
}

/// `∇(F'(ρ) + V + W⋆ρ)` at the nodes; `None` where the density vanishes.
pub fn chemical_gradient(rho: &DensityGrid, spec: &EnergySpec) -> Result<Vec<Option<f64>>> {
    interaction_supported(rho, spec)?;
    let n = rho.len();
    let h = rho.spacing();
    let xs = rho.nodes();
    let conv = convolve(rho, &spec.interaction);
    let psi: Vec<f64> = (0..n)
        .map(|i| spec.internal.df(rho.values[i]) + spec.confinement.eval(xs[i]) + conv[i])
        .collect();
    let vmax = rho.values.iter().copied().fold(0.0, f64::max);
    let edge_jump = |v: f64| v > 1e-10 * vmax;
    let radial = matches!(rho.geometry, Geometry::Radial { .. });
    Ok((0..n)
        .map(|i| {
            if rho.values[i] <= 0.0 {
                return None;
            }
            let left = i > 0 && rho.values[i - 1] > 0.0;
            let right = i + 1 < n && rho.values[i + 1] > 0.0;
            let jump = (i > 0 && !left)
                || (i + 1 < n && !right)
                || (i == n - 1 && edge_jump(rho.values[i]))
                || (i == 0 && !radial && edge_jump(rho.values[i]));
            if jump {
                return Some(f64::INFINITY);
            }
            Some(match (i > 0, i + 1 < n) {
                (true, true) => (psi[i + 1] - psi[i - 1]) / (2.0 * h),
                (false, _) => (psi[1] - psi[0]) / h,
                (_, false) => (psi[i] - psi[i - 1]) / h,
            })
        })
        .collect())
}

/// `I_{c*}(ρ | ρ_V) = ∫ ρ c*(-∇(F'(ρ) + V + W⋆ρ))`.
pub fn entropy_production(rho: &DensityGrid, spec: &EnergySpec, young: &YoungPair) -> Result<EntropyProduction> {
    let grad = chemical_gradient(rho, spec)?;
    let masked = grad.iter().filter(|g| g.is_none()).count();
    if grad.iter().any(|g| g.is_some_and(f64::is_infinite)) {
        return Ok(EntropyProduction { value: f64::INFINITY, masked, infinite: true });
    }
    let h = rho.spacing();
    let n = rho.len();
    let mut s = 0.0;
    for (i, g) in grad.iter().enumerate() {
        if let Some(g) = g {
            let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            s += w * rho.values[i] * young.c_star(-g) * rho.measure(rho.node(i));
        }
    }
    Ok(EntropyProduction { value: s * h, masked, infinite: false })
}
