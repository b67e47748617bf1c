use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::sphere_area;

/// Tolerance on the total mass of an already-normalised density.
pub const MASS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Geometry {
    Line,
    /// Radial density on `R^n`; nodes are radii.
    Radial { n: u32 },
}

/// Probability density sampled on a uniform grid, zero outside `[lo, hi]`.
///
/// Integrals use the trapezoid rule on the nodes. The cumulative is the
/// trapezoid running sum and the quantile its piecewise-linear inverse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityGrid {
    pub geometry: Geometry,
    pub lo: f64,
    pub hi: f64,
    pub values: Vec<f64>,
    cdf: Vec<f64>,
}

impl DensityGrid {
    /// Normalises `values` (node samples on `[lo, hi]`) to unit mass.
    pub fn new(geometry: Geometry, lo: f64, hi: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() < 3 {
            return Err(Error::invalid("a density grid needs at least 3 nodes"));
        }
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::invalid(format!("bad density support [{lo}, {hi}]")));
        }
        if let Geometry::Radial { n } = geometry {
            if lo < 0.0 || n == 0 {
                return Err(Error::invalid("radial densities need lo >= 0 and n >= 1"));
            }
        }
        if let Some(v) = values.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
            return Err(Error::invalid(format!("density values must be finite and non-negative (got {v})")));
        }
        let mut g = DensityGrid { geometry, lo, hi, values, cdf: Vec::new() };
        let mass = g.raw_cdf().last().copied().unwrap_or(0.0);
        if !(mass > 0.0) {
            return Err(Error::invalid("density has zero mass"));
        }
        g.values.iter_mut().for_each(|v| *v /= mass);
        g.cdf = g.raw_cdf();
        Ok(g)
    }

    pub fn from_fn(geometry: Geometry, lo: f64, hi: f64, nodes: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let h = (hi - lo) / (nodes.max(2) - 1) as f64;
        Self::new(geometry, lo, hi, (0..nodes).map(|i| f(lo + h * i as f64)).collect())
    }

    /// `N(mean, sd²)` on `mean ± 12 sd`.
    pub fn gaussian(mean: f64, sd: f64, nodes: usize) -> Result<Self> {
        if !(sd > 0.0) {
            return Err(Error::invalid("standard deviation must be positive"));
        }
        Self::from_fn(Geometry::Line, mean - 12.0 * sd, mean + 12.0 * sd, nodes, |x| {
            (-0.5 * ((x - mean) / sd).powi(2)).exp()
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / (self.len() - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        self.lo + self.spacing() * i as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.node(i)).collect()
    }

    /// Volume element at node `x` (1 on the line, `|S^{n-1}| x^{n-1}` radially).
    pub fn measure(&self, x: f64) -> f64 {
        match self.geometry {
            Geometry::Line => 1.0,
            Geometry::Radial { n } => sphere_area(n) * x.powi(n as i32 - 1),
        }
    }

    fn raw_cdf(&self) -> Vec<f64> {
        let h = self.spacing();
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(self.len());
        out.push(0.0);
        for i in 1..self.len() {
            let (a, b) = (self.node(i - 1), self.node(i));
            acc += 0.5 * h * (self.values[i - 1] * self.measure(a) + self.values[i] * self.measure(b));
            out.push(acc);
        }
        out
    }

    /// Trapezoid integral of `g(x, ρ(x))` against the geometry's measure.
    pub fn integrate(&self, g: impl Fn(f64, f64) -> f64) -> f64 {
        let h = self.spacing();
        let last = self.len() - 1;
        let mut s = 0.0;
        for (i, &v) in self.values.iter().enumerate() {
            let x = self.node(i);
            let w = if i == 0 || i == last { 0.5 } else { 1.0 };
            let term = g(x, v);
            if term != 0.0 {
                s += w * term * self.measure(x);
            }
        }
        s * h
    }

    pub fn mass(&self) -> f64 {
        *self.cdf.last().unwrap()
    }

    /// First moment; for radial densities this is 0 by symmetry.
    pub fn barycenter(&self) -> f64 {
        match self.geometry {
            Geometry::Line => self.integrate(|x, r| x * r),
            Geometry::Radial { .. } => 0.0,
        }
    }

    pub fn second_moment(&self) -> f64 {
        self.integrate(|x, r| x * x * r)
    }

    pub fn cdf(&self) -> &[f64] {
        &self.cdf
    }

    /// Piecewise-linear inverse of the cumulative; exact at the nodes.
    pub fn quantile(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, 1.0) * self.mass();
        let i = self.cdf.partition_point(|&c| c < t);
        if i == 0 {
            // first node with positive mass to its right
            let j = self.cdf.partition_point(|&c| c <= 0.0);
            return self.node(j.saturating_sub(1));
        }
        if i >= self.len() {
            return self.hi;
        }
        let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
        let f = if c1 > c0 { (t - c0) / (c1 - c0) } else { 0.0 };
        self.node(i - 1) + f * self.spacing()
    }

    /// Piecewise-linear cumulative at arbitrary `x`.
    pub fn cdf_at(&self, x: f64) -> f64 {
        if x <= self.lo {
            return 0.0;
        }
        if x >= self.hi {
            return self.mass();
        }
        let u = (x - self.lo) / self.spacing();
        let i = (u.floor() as usize).min(self.len() - 2);
        let f = u - i as f64;
        self.cdf[i] + f * (self.cdf[i + 1] - self.cdf[i])
    }

    /// Linear interpolation of the node values; zero outside the support.
    pub fn value_at(&self, x: f64) -> f64 {
        if x < self.lo || x > self.hi {
            return 0.0;
        }
        let u = (x - self.lo) / self.spacing();
        let i = (u.floor() as usize).min(self.len() - 2);
        let f = u - i as f64;
        self.values[i] * (1.0 - f) + self.values[i + 1] * f
    }

    /// Every other node (for error estimates); needs an odd node count.
    pub fn coarsened(&self) -> Option<Self> {
        if self.len().is_multiple_of(2) || self.len() < 5 {
            return None;
        }
        let values = self.values.iter().step_by(2).copied().collect();
        DensityGrid::new(self.geometry, self.lo, self.hi, values).ok()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,rho\n");
        for (i, v) in self.values.iter().enumerate() {
            s.push_str(&format!("{:e},{:e}\n", self.node(i), v));
        }
        s
    }

    /// Reads uniformly spaced `(x, rho)` rows (first row a header).
    pub fn from_csv(text: &str, geometry: Geometry) -> Result<Self> {
        let mut xs = Vec::new();
        let mut vs = Vec::new();
        for (i, line) in text.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let mut it = line.split(',').map(|p| p.trim().parse::<f64>());
            match (it.next(), it.next()) {
                (Some(Ok(x)), Some(Ok(v))) => {
                    xs.push(x);
                    vs.push(v);
                }
                _ => return Err(Error::invalid(format!("bad CSV row {}: `{line}`", i + 1))),
            }
        }
        if xs.len() < 3 {
            return Err(Error::invalid("density CSV needs at least 3 rows"));
        }
        let h = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
        for (i, x) in xs.iter().enumerate() {
            if (x - (xs[0] + h * i as f64)).abs() > 1e-9 * h.abs().max(1.0) {
                return Err(Error::invalid("density CSV nodes must be uniformly spaced"));
            }
        }
        DensityGrid::new(geometry, xs[0], xs[xs.len() - 1], vs)
    }
}

/// Monotone (quantile) coupling `s = Q₁ ∘ F₀` sampled at the nodes of `rho0`.
pub fn monotone_map(rho0: &DensityGrid, rho1: &DensityGrid) -> Vec<f64> {
    rho0.cdf().iter().map(|&c| rho1.quantile(c / rho0.mass())).collect()
}

fn check_pair(rho0: &DensityGrid, rho1: &DensityGrid) -> Result<()> {
    if rho0.geometry != rho1.geometry {
        return Err(Error::invalid("densities have different geometry tags"));
    }
    for r in [rho0, rho1] {
        let mass = r.integrate(|_, v| v);
        if (mass - 1.0).abs() > MASS_TOL {
            return Err(Error::invalid(format!("density mass {mass} differs from 1")));
        }
    }
    Ok(())
}

fn w2_squared(rho0: &DensityGrid, rho1: &DensityGrid) -> f64 {
    // Merge the breakpoints of both piecewise-linear quantile functions; the
    // difference is linear between them and is integrated exactly.
    let mut ts: Vec<f64> = rho0.cdf().iter().chain(rho1.cdf()).copied().collect();
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let mut s = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    for &t in &ts {
        let d = rho0.quantile(t) - rho1.quantile(t);
        if let Some((t0, d0)) = prev {
            s += (t - t0) * (d0 * d0 + d0 * d + d * d) / 3.0;
        }
        prev = Some((t, d));
    }
    s
}

/// Quadratic Wasserstein distance with an error estimate from a coarser grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wasserstein {
    pub value: f64,
    pub error: f64,
}

/// `W₂(ρ₀, ρ₁)` through the monotone quantile coupling.
pub fn wasserstein_1d(rho0: &DensityGrid, rho1: &DensityGrid) -> Result<Wasserstein> {
    check_pair(rho0, rho1)?;
    let value = w2_squared(rho0, rho1).max(0.0).sqrt();
    let error = match (rho0.coarsened(), rho1.coarsened()) {
        (Some(a), Some(b)) => (w2_squared(&a, &b).max(0.0).sqrt() - value).abs(),
        _ => rho0.spacing().max(rho1.spacing()),
    };
    Ok(Wasserstein { value, error: error + 1e-12 })
}

/// Residuals of `∫h ρ₁ = ∫h∘s ρ₀` over a fixed ten-function family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PushForwardResidual {
    pub residuals: Vec<f64>,
    pub max: f64,
}

pub const TEST_FUNCTIONS: [(&str, fn(f64) -> f64); 10] = [
    ("1", |_| 1.0),
    ("y", |y| y),
    ("y^2", |y| y * y),
    ("y^3", |y| y * y * y),
    ("sin y", f64::sin),
    ("cos y", f64::cos),
    ("exp(-y^2)", |y| (-y * y).exp()),
    ("tanh y", f64::tanh),
    ("|y|", f64::abs),
    ("1/(1+y^2)", |y| 1.0 / (1.0 + y * y)),
];

/// Change-of-variables residual for the map `s` given at the nodes of `rho0`.
pub fn push_forward_check(s: &[f64], rho0: &DensityGrid, rho1: &DensityGrid) -> Result<PushForwardResidual> {
    if s.len() != rho0.len() {
        return Err(Error::invalid("map must be sampled at the nodes of rho0"));
    }
    if s.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("map is not monotone"));
    }
    let h0 = rho0.spacing();
    let residuals: Vec<f64> = TEST_FUNCTIONS
        .iter()
        .map(|(_, h)| {
            let lhs = rho1.integrate(|y, r| h(y) * r);
            let mut rhs = 0.0;
            for (i, (&si, &r)) in s.iter().zip(&rho0.values).enumerate() {
                let w = if i == 0 || i == s.len() - 1 { 0.5 } else { 1.0 };
                rhs += w * h(si) * r * rho0.measure(rho0.node(i));
            }
            (lhs - rhs * h0).abs()
        })
        .collect();
    let max = residuals.iter().copied().fold(0.0, f64::max);
    Ok(PushForwardResidual { residuals, max })
}
