use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transport::{legendre_on, GridFunction};

/// Convex piecewise-linear function on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexFunction {
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
}

impl ConvexFunction {
    /// Rejects grids that do not span `[-1, 1]` and values whose second
    /// differences fall below `-1e-10`.
    pub fn new(xs: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if xs.len() < 2 || xs.len() != values.len() {
            return Err(Error::invalid("convex function needs matching grids of length >= 2"));
        }
        if (xs[0] + 1.0).abs() > 1e-12 || (xs[xs.len() - 1] - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("grid must span [-1, 1]"));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("grid must increase and values be finite"));
        }
        let f = ConvexFunction { xs, values };
        if let Some(i) = f.slopes().windows(2).position(|s| s[1] - s[0] < -1e-10) {
            return Err(Error::invalid(format!("function is not convex near x = {}", f.xs[i + 1])));
        }
        Ok(f)
    }

    pub fn sample(nodes: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let xs: Vec<f64> = (0..nodes).map(|i| -1.0 + 2.0 * i as f64 / (nodes - 1) as f64).collect();
        let values = xs.iter().map(|&x| f(x)).collect();
        Self::new(xs, values)
    }

    fn slopes(&self) -> Vec<f64> {
        self.xs
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, v)| (v[1] - v[0]) / (x[1] - x[0]))
            .collect()
    }

    pub fn is_convex(&self) -> bool {
        self.slopes().windows(2).all(|s| s[1] - s[0] >= -1e-10)
    }

    /// `u*` on the given points, via the discrete Legendre transform.
    pub fn conjugate(&self, ys: &[f64]) -> Result<GridFunction> {
        legendre_on(&GridFunction::new(self.xs.clone(), self.values.clone())?, ys)
    }

    /// `tu + (1-t)v` on a shared grid.
    pub fn blend(&self, other: &Self, t: f64) -> Result<Self> {
        if self.xs != other.xs {
            return Err(Error::invalid("blending needs a shared grid"));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| t * a + (1.0 - t) * b).collect();
        Self::new(self.xs.clone(), values)
    }
}

/// `ln ∫_a^b e^{cy} dy` for `a < b` (either end may be infinite on the
/// decaying side).
fn log_exp_segment(c: f64, a: f64, b: f64) -> f64 {
    if c == 0.0 {
        return (b - a).ln();
    }
    let (top, len) = if c > 0.0 { (c * b, b - a) } else { (c * a, b - a) };
    if len.is_infinite() {
        return top - c.abs().ln();
    }
    top + (-(-c.abs() * len).exp_m1() / c.abs()).ln()
}

/// `Φ(u) = ∫u dx - ln(½ ∫ e^{-2u*} dy)`, exact for piecewise-linear `u`:
/// `u*` is piecewise linear with breaks at the slopes of `u`.
pub fn ghigi_phi(u: &ConvexFunction) -> Result<f64> {
    if !u.is_convex() {
        return Err(Error::invalid("Ghigi's functional needs a convex function"));
    }
    let s = u.slopes();
    let n = u.xs.len();
    let mut logs = Vec::with_capacity(n);
    for j in 0..n {
        let lo = if j == 0 { f64::NEG_INFINITY } else { s[j - 1] };
        let hi = if j == n - 1 { f64::INFINITY } else { s[j] };
        if hi <= lo {
            continue;
        }
        // u*(y) = x_j y - u_j on [lo, hi]
        logs.push(2.0 * u.values[j] + log_exp_segment(-2.0 * u.xs[j], lo, hi));
    }
    let m = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let log_int = m + logs.iter().map(|l| (l - m).exp()).sum::<f64>().ln();
    let mean: f64 = u
        .xs
        .windows(2)
        .zip(u.values.windows(2))
        .map(|(x, v)| 0.5 * (x[1] - x[0]) * (v[0] + v[1]))
        .sum();
    let phi = mean - (log_int - 2f64.ln());
    if !phi.is_finite() {
        return Err(Error::numerical("Ghigi functional is not finite"));
    }
    Ok(phi)
}

/// Convex function on `nodes` uniform points with slope increments `e^{θ_j}`
/// (slope and offset are irrelevant to Φ).
pub fn convex_from_increments(theta: &[f64]) -> Result<ConvexFunction> {
    let cells = theta.len() + 1;
    let h = 2.0 / cells as f64;
    let xs: Vec<f64> = (0..=cells).map(|i| -1.0 + h * i as f64).collect();
    let mut values = vec![0.0];
    let mut slope = 0.0;
    for i in 0..cells {
        if i > 0 {
            slope += theta[i - 1].exp();
        }
        values.push(values[i] + h * slope);
    }
    ConvexFunction::new(xs, values)
}

/// Seeded random convex function.
pub fn random_convex(seed: u64, nodes: usize) -> Result<ConvexFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale: f64 = rng.gen_range(-3.0..2.0);
    let theta: Vec<f64> = (0..nodes - 2).map(|_| scale + rng.gen_range(-3.0..3.0)).collect();
    convex_from_increments(&theta)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GhigiSearch {
    /// Best value over the `a x² + b|x| + c` family and its parameters.
    pub family_value: f64,
    pub family_params: [f64; 2],
    /// Best value over free convex functions on the vertex grid.
    pub vertex_value: f64,
    pub best: f64,
    pub trace: Vec<(usize, f64)>,
}

fn family(a: f64, b: f64) -> Result<ConvexFunction> {
    ConvexFunction::sample(801, |x| a.max(0.0) * x * x + b.max(0.0) * x.abs())
}

/// Minimises Φ over the 3-parameter family (compass search) and over free
/// convex functions with `vertices` nodes (coordinate descent on the
/// log slope increments).
pub fn ghigi_minimize(vertices: usize, budget: usize) -> Result<GhigiSearch> {
    let f = |p: [f64; 2]| family(p[0], p[1]).and_then(|u| ghigi_phi(&u)).unwrap_or(f64::INFINITY);
    let mut p = [0.5, 0.5];
    let mut fp = f(p);
    let mut step = 0.25;
    let mut trace = vec![(0, fp)];
    let mut it = 0;
    while step > 1e-7 && it < budget {
        it += 1;
        let mut moved = false;
        for (da, db) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)] {
            let q = [(p[0] + da * step).max(0.0), (p[1] + db * step).max(0.0)];
            let fq = f(q);
            if fq < fp {
                p = q;
                fp = fq;
                moved = true;
            }
        }
        if !moved {
            step *= 0.5;
        }
        trace.push((it, fp));
    }

    let m = vertices.max(3);
    let mut theta = vec![0.0; m - 2];
    let g = |th: &[f64]| convex_from_increments(th).and_then(|u| ghigi_phi(&u)).unwrap_or(f64::INFINITY);
    let mut fv = g(&theta);
    let mut step = 1.0;
    let mut sweeps = 0;
    while step > 1e-4 && sweeps < budget {
        sweeps += 1;
        let mut moved = false;
        for k in 0..theta.len() {
            for d in [step, -step] {
                theta[k] += d;
                let v = g(&theta);
                if v < fv {
                    fv = v;
                    moved = true;
                    break;
                }
                theta[k] -= d;
            }
        }
        if !moved {
            step *= 0.5;
        }
        trace.push((it + sweeps, fp.min(fv)));
    }
    Ok(GhigiSearch { family_value: fp, family_params: p, vertex_value: fv, best: fp.min(fv), trace })
}
