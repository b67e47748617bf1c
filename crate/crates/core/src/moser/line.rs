use serde::{Deserialize, Serialize};

use super::sphere::SphereFunction;
use crate::error::{Error, Result};
use std::sync::OnceLock;

use crate::quad::{gauss_legendre, integrate_adaptive};

/// Function on `(-1, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LineFunction {
    /// Piecewise-linear interpolant; all functionals are evaluated exactly.
    Nodal { xs: Vec<f64>, values: Vec<f64> },
    /// `Σ c_k T_k(x)`.
    Chebyshev { coeffs: Vec<f64> },
    /// `g(x) = u(arccos x)` for an axisymmetric sphere profile.
    Axisymmetric { profile: SphereFunction },
}

/// `(e^z - 1) / z`.
fn phi1(z: f64) -> f64 {
    if z.abs() < 1e-5 {
        1.0 + z / 2.0 + z * z / 6.0
    } else {
        z.exp_m1() / z
    }
}

/// `∫_0^1 τ e^{zτ} dτ`.
fn phi2(z: f64) -> f64 {
    if z.abs() < 1e-3 {
        0.5 + z / 3.0 + z * z / 8.0 + z * z * z / 30.0
    } else {
        (z.exp() * (z - 1.0) + 1.0) / (z * z)
    }
}

fn chebyshev(coeffs: &[f64], x: f64) -> (f64, f64) {
    // T_k and U_{k-1} recurrences; T_k' = k U_{k-1}.
    let (mut t0, mut t1) = (1.0, x);
    let (mut u0, mut u1) = (0.0, 1.0);
    let mut g = coeffs.first().copied().unwrap_or(0.0);
    let mut d = 0.0;
    for (k, c) in coeffs.iter().enumerate().skip(1) {
        g += c * t1;
        d += c * k as f64 * u1;
        let t2 = 2.0 * x * t1 - t0;
        let u2 = 2.0 * x * u1 - u0;
        t0 = t1;
        t1 = t2;
        u0 = u1;
        u1 = u2;
    }
    (g, d)
}

/// The pieces of `I_α` that do not involve α.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineIntegrals {
    /// `∫(1-x²) g'²`
    pub seminorm: f64,
    /// `∫ g`
    pub mean: f64,
    /// `ln(½ ∫ e^{2g})`
    pub log_exp: f64,
    /// `∫ x e^{2g} / ∫ e^{2g}`
    pub residual: f64,
}

impl LineIntegrals {
    pub fn value(&self, alpha: f64) -> f64 {
        0.5 * alpha * self.seminorm + self.mean - self.log_exp
    }
}

const QTOL: f64 = 1e-14;

/// Chebyshev input whose non-constant coefficients sum to at most this is
/// integrated with a fixed Gauss rule instead of adaptively.
const GAUSS_SPREAD: f64 = 6.0;

fn gauss_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(200))
}

/// Chebyshev samples on the Gauss nodes: `(w, x, g, (1-x²)g'²)`.
struct GaussSamples(Vec<(f64, f64, f64, f64)>);

impl GaussSamples {
    fn new(coeffs: &[f64]) -> Option<Self> {
        let spread: f64 = coeffs.iter().skip(1).map(|c| c.abs()).sum();
        if !(spread <= GAUSS_SPREAD) {
            return None;
        }
        let (xs, ws) = gauss_rule();
        Some(GaussSamples(
            xs.iter()
                .zip(ws)
                .map(|(&x, &w)| {
                    let (g, d) = chebyshev(coeffs, x);
                    (w, x, g, (1.0 - x * x) * d * d)
                })
                .collect(),
        ))
    }

    /// `(∫e^{2(g+ax-m)}, mean of x, variance of x)` under that weight.
    fn moments(&self, a: f64, m: f64) -> (f64, f64, f64) {
        let (mut e, mut xe, mut xxe) = (0.0, 0.0, 0.0);
        for &(w, x, g, _) in &self.0 {
            let v = w * (2.0 * (g + a * x - m)).exp();
            e += v;
            xe += x * v;
            xxe += x * x * v;
        }
        let mean = xe / e;
        (e, mean, xxe / e - mean * mean)
    }

    fn integrals(&self) -> LineIntegrals {
        let m = self.0.iter().map(|s| s.2).fold(f64::NEG_INFINITY, f64::max);
        let seminorm = self.0.iter().map(|s| s.0 * s.3).sum();
        let mean = self.0.iter().map(|s| s.0 * s.2).sum();
        let (e, residual, _) = self.moments(0.0, m);
        LineIntegrals { seminorm, mean, log_exp: (0.5 * e).ln() + 2.0 * m, residual }
    }
}

impl LineFunction {
    pub fn nodal(xs: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if xs.len() < 2 || xs.len() != values.len() {
            return Err(Error::invalid("nodal line function needs matching grids of length >= 2"));
        }
        if (xs[0] + 1.0).abs() > 1e-12 || (xs[xs.len() - 1] - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("nodal grid must span [-1, 1]"));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("grid must increase and values be finite"));
        }
        Ok(LineFunction::Nodal { xs, values })
    }

    /// Samples `f` on `nodes` uniform points.
    pub fn sample(nodes: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let xs: Vec<f64> = (0..nodes).map(|i| -1.0 + 2.0 * i as f64 / (nodes - 1) as f64).collect();
        let values = xs.iter().map(|&x| f(x)).collect();
        Self::nodal(xs, values)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.parts(x).0
    }

    /// `(g(x), (1-x²) g'(x)²)`.
    pub fn parts(&self, x: f64) -> (f64, f64) {
        match self {
            LineFunction::Nodal { xs, values } => {
                let i = xs.partition_point(|&p| p <= x).clamp(1, xs.len() - 1);
                let h = xs[i] - xs[i - 1];
                let s = (values[i] - values[i - 1]) / h;
                (values[i - 1] + s * (x - xs[i - 1]), (1.0 - x * x) * s * s)
            }
            LineFunction::Chebyshev { coeffs } => {
                let (g, d) = chebyshev(coeffs, x);
                (g, (1.0 - x * x) * d * d)
            }
            LineFunction::Axisymmetric { profile } => {
                let (u, du) = profile.eval(x.clamp(-1.0, 1.0).acos());
                (u, du * du)
            }
        }
    }

    /// `g + a x + c`.
    pub fn shifted(&self, a: f64, c: f64) -> Result<Self> {
        Ok(match self {
            LineFunction::Nodal { xs, values } => LineFunction::Nodal {
                xs: xs.clone(),
                values: xs.iter().zip(values).map(|(x, v)| v + a * x + c).collect(),
            },
            LineFunction::Chebyshev { coeffs } => {
                let mut c2 = coeffs.clone();
                c2.resize(c2.len().max(2), 0.0);
                c2[0] += c;
                c2[1] += a;
                LineFunction::Chebyshev { coeffs: c2 }
            }
            LineFunction::Axisymmetric { .. } if a == 0.0 && c == 0.0 => self.clone(),
            LineFunction::Axisymmetric { .. } => {
                return Err(Error::Unsupported("shifts of sphere-backed line functions".into()))
            }
        })
    }

    fn sup(&self) -> f64 {
        match self {
            LineFunction::Nodal { values, .. } => values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            _ => (0..=400).map(|i| self.eval(-1.0 + i as f64 / 200.0)).fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// All α-independent pieces of `I_α`; `e^{2g}` is rescaled by `e^{2 max g}`.
    pub fn integrals(&self) -> Result<LineIntegrals> {
        if let LineFunction::Chebyshev { coeffs } = self {
            if let Some(s) = GaussSamples::new(coeffs) {
                let ints = s.integrals();
                if ints.log_exp.is_finite() && ints.residual.is_finite() {
                    return Ok(ints);
                }
            }
        }
        let m = self.sup();
        if !m.is_finite() {
            return Err(Error::numerical("line function is not finite"));
        }
        let (seminorm, mean, e, xe) = match self {
            LineFunction::Nodal { xs, values } => {
                let (mut d, mut g, mut e, mut xe) = (0.0, 0.0, 0.0, 0.0);
                for i in 1..xs.len() {
                    let (a, b) = (xs[i - 1], xs[i]);
                    let h = b - a;
                    let dg = values[i] - values[i - 1];
                    d += dg * dg / (h * h) * (h - (b * b * b - a * a * a) / 3.0);
                    g += 0.5 * h * (values[i] + values[i - 1]);
                    let z = 2.0 * dg;
                    let base = (2.0 * (values[i - 1] - m)).exp() * h;
                    e += base * phi1(z);
                    xe += base * (a * phi1(z) + h * phi2(z));
                }
                (d, g, e, xe)
            }
            _ => {
                let q = |f: &dyn Fn(f64) -> f64| {
                    let r = integrate_adaptive(f, -1.0, 1.0, 1e-300, QTOL);
                    r.value
                };
                (
                    q(&|x| self.parts(x).1),
                    q(&|x| self.eval(x)),
                    q(&|x| (2.0 * (self.eval(x) - m)).exp()),
                    q(&|x| x * (2.0 * (self.eval(x) - m)).exp()),
                )
            }
        };
        if !(e > 0.0) || !seminorm.is_finite() {
            return Err(Error::numerical("line functional integrals are not finite"));
        }
        Ok(LineIntegrals { seminorm, mean, log_exp: (0.5 * e).ln() + 2.0 * m, residual: xe / e })
    }

    pub fn seminorm(&self) -> Result<f64> {
        Ok(self.integrals()?.seminorm)
    }

    pub fn constraint_residual(&self) -> Result<f64> {
        Ok(self.integrals()?.residual)
    }

    /// Shift `g ↦ g + a x` with `a` chosen so that `∫ x e^{2g} = 0`.
    pub fn project(&self) -> Result<Self> {
        if let LineFunction::Chebyshev { coeffs } = self {
            if let Some(g) = self.project_newton(coeffs)? {
                return Ok(g);
            }
        }
        let r = |a: f64| self.shifted(a, 0.0).and_then(|g| g.constraint_residual());
        let r0 = r(0.0)?;
        if r0.abs() <= 1e-13 {
            return Ok(self.clone());
        }
        // r is increasing in a.
        let mut step = if r0 > 0.0 { -1.0 } else { 1.0 };
        let mut far = step;
        while r(far)?.signum() == r0.signum() {
            step *= 2.0;
            far = step;
            if far.abs() > 1e6 {
                return Err(Error::numerical("constraint projection failed to bracket"));
            }
        }
        let (mut lo, mut hi) = if far < 0.0 { (far, 0.0) } else { (0.0, far) };
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let v = r(mid)?;
            if v.abs() <= 1e-13 {
                lo = mid;
                hi = mid;
                break;
            }
            if v > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let g = self.shifted(0.5 * (lo + hi), 0.0)?;
        let res = g.constraint_residual()?;
        if res.abs() > 1e-8 {
            return Err(Error::numerical(format!("constraint projection left residual {res:e}")));
        }
        Ok(g)
    }

    /// Newton on the shift; `r'(a) = 2 Var(x)` under the weight `e^{2(g+ax)}`.
    fn project_newton(&self, coeffs: &[f64]) -> Result<Option<Self>> {
        let Some(s) = GaussSamples::new(coeffs) else {
            return Ok(None);
        };
        let mut a = 0.0;
        for _ in 0..50 {
            let m = s.0.iter().map(|p| p.2 + a * p.1).fold(f64::NEG_INFINITY, f64::max);
            let (_, r, var) = s.moments(a, m);
            if r.abs() <= 1e-14 {
                break;
            }
            if !(var > 1e-6) {
                return Ok(None);
            }
            a -= (r / (2.0 * var)).clamp(-1.0, 1.0);
        }
        let g = self.shifted(a, 0.0)?;
        match g.integrals() {
            Ok(ints) if ints.residual.abs() <= 1e-13 => Ok(Some(g)),
            _ => Ok(None),
        }
    }

    pub fn to_csv(&self, points: usize) -> String {
        let mut s = String::from("x,g\n");
        for i in 0..points {
            let x = -1.0 + 2.0 * i as f64 / (points - 1) as f64;
            s.push_str(&format!("{:e},{:e}\n", x, self.eval(x)));
        }
        s
    }
}

/// `I_α(g) = (α/2)∫(1-x²)g'² + ∫g - ln(½∫e^{2g})` on `(-1, 1)` with `dx`.
pub fn i_alpha(g: &LineFunction, alpha: f64) -> Result<f64> {
    Ok(g.integrals()?.value(alpha))
}

/// Symmetric blow-up profile `g(x) = -t ln((1+δ)² - x²)` with `δ = e^{-depth}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlowUp {
    pub t: f64,
    pub depth: f64,
}

impl BlowUp {
    pub fn eval(&self, x: f64) -> f64 {
        let a = 1.0 + (-self.depth).exp();
        -self.t * (a * a - x * x).ln()
    }

    /// `I_α` evaluated in `v = ln((1+δ) - |x|)` so that `δ` may be as small
    /// as `e^{-10^4}`.
    pub fn i_alpha(&self, alpha: f64) -> Result<f64> {
        let (t, depth) = (self.t, self.depth);
        if !(t > 0.5) || !(depth > 0.0) {
            return Err(Error::invalid("blow-up family needs t > 1/2 and depth > 0"));
        }
        let delta = (-depth).exp();
        let a = 1.0 + delta;
        let top = delta.ln_1p();
        let tol = |f: &dyn Fn(f64) -> f64| integrate_adaptive(f, -depth, top, 1e-300, 1e-13).value;
        // x = a - w, w = e^v on each half.
        let dirichlet = 2.0 * tol(&|v: f64| {
            let w = v.exp();
            let x = a - w;
            let frac = -(-depth - v).exp_m1();
            4.0 * t * t * x * x * frac * (2.0 + delta - w) / (2.0 * a - w).powi(2)
        });
        let prim = |w: f64| {
            let q = 2.0 * a - w;
            (w * w.ln() - w) - (q * q.ln() - q)
        };
        let mean = -2.0 * t * (prim(a) - (delta * (-depth) - delta - ((2.0 * a - delta) * (2.0 * a - delta).ln() - (2.0 * a - delta))));
        let k = 1.0 - 2.0 * t;
        let scaled = tol(&|v: f64| (k * (v + depth) - 2.0 * t * (2.0 * a - v.exp()).ln()).exp());
        let log_e = 2f64.ln() + k * (-depth) + scaled.ln();
        let value = 0.5 * alpha * dirichlet + mean - (log_e - 2f64.ln());
        if !value.is_finite() {
            return Err(Error::numerical("blow-up functional is not finite"));
        }
        Ok(value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MinimizeStatus {
    Converged,
    Diverging,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub value: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizeOutcome {
    pub alpha: f64,
    pub status: MinimizeStatus,
    pub inf_estimate: f64,
    pub minimizer: Option<LineFunction>,
    pub trace: Vec<TraceRow>,
}

impl MinimizeOutcome {
    pub fn trace_csv(&self) -> String {
        let mut s = String::from("iteration,value,residual\n");
        for r in &self.trace {
            s.push_str(&format!("{},{:e},{:e}\n", r.iteration, r.value, r.residual));
        }
        s
    }
}

/// Number of Chebyshev modes in the descent space.
const MODES: usize = 10;

/// Projected descent on `g = Σ_{k≤10} c_k T_k` from `start` (coefficients).
pub(crate) fn descend(alpha: f64, start: &[f64], budget: usize) -> Result<MinimizeOutcome> {
    let mut coeffs = start.to_vec();
    coeffs.resize(MODES + 1, 0.0);
    coeffs[0] = 0.0;
    let eval = |c: &[f64]| -> Result<(f64, LineFunction, f64)> {
        let g = LineFunction::Chebyshev { coeffs: c.to_vec() }.project()?;
        let ints = g.integrals()?;
        Ok((ints.value(alpha), g, ints.residual))
    };
    let (mut value, mut best_g, res) = eval(&coeffs)?;
    let mut trace = vec![TraceRow { iteration: 0, value, residual: res }];
    let mut best = value;
    let grad = |c: &[f64]| -> Result<Vec<f64>> {
        let mut out = vec![0.0; c.len()];
        for k in 2..c.len() {
            let h = 1e-6;
            let mut p = c.to_vec();
            p[k] += h;
            let fp = eval(&p)?.0;
            p[k] -= 2.0 * h;
            let fm = eval(&p)?.0;
            out[k] = (fp - fm) / (2.0 * h);
        }
        Ok(out)
    };
    let mut g = grad(&coeffs)?;
    let mut step = 0.1;
    let mut status = MinimizeStatus::Inconclusive;
    for it in 1..=budget {
        let gn: f64 = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if gn < 1e-9 {
            status = MinimizeStatus::Converged;
            break;
        }
        // Armijo backtracking.
        let mut accepted = None;
        let mut s = step;
        for _ in 0..40 {
            let trial: Vec<f64> = coeffs.iter().zip(&g).map(|(c, d)| c - s * d).collect();
            if let Ok((v, gf, r)) = eval(&trial) {
                if v <= value - 1e-4 * s * gn * gn {
                    accepted = Some((trial, v, gf, r));
                    break;
                }
            }
            s *= 0.5;
        }
        let Some((trial, v, gf, r)) = accepted else {
            status = MinimizeStatus::Converged;
            break;
        };
        let new_g = grad(&trial)?;
        // Barzilai-Borwein step for the next iteration.
        let sk: Vec<f64> = trial.iter().zip(&coeffs).map(|(a, b)| a - b).collect();
        let yk: Vec<f64> = new_g.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy: f64 = sk.iter().zip(&yk).map(|(a, b)| a * b).sum();
        let ss: f64 = sk.iter().map(|a| a * a).sum();
        step = if sy > 0.0 { (ss / sy).clamp(1e-4, 10.0) } else { 0.1 };
        coeffs = trial;
        g = new_g;
        value = v;
        trace.push(TraceRow { iteration: it, value: v, residual: r });
        if v < best {
            best = v;
            best_g = gf;
        }
    }
    Ok(MinimizeOutcome { alpha, status, inf_estimate: best, minimizer: Some(best_g), trace })
}

/// Estimates `inf_{g ∈ 𝒢} I_α(g)`. For `α >= 1/2` this runs projected
/// descent from `0.3 x²`; below 1/2 it follows the blow-up family with
/// `t = 1/(2α)` and doubling depth until the value drops below `-10³`.
pub fn minimize_i_alpha(alpha: f64, budget: usize) -> Result<MinimizeOutcome> {
    if !(alpha > 0.0) {
        return Err(Error::invalid(format!("alpha must be positive (got {alpha})")));
    }
    if alpha >= 0.5 {
        // 0.3 x² = 0.15 T_0 + 0.15 T_2
        return descend(alpha, &[0.0, 0.0, 0.15, 0.05, 0.02], budget);
    }
    let t = 1.0 / (2.0 * alpha);
    let mut trace = Vec::new();
    let mut best = f64::INFINITY;
    let mut status = MinimizeStatus::Inconclusive;
    for it in 0..budget.min(60) {
        let depth = 2f64.powi(it as i32);
        let v = BlowUp { t, depth }.i_alpha(alpha)?;
        trace.push(TraceRow { iteration: it, value: v, residual: 0.0 });
        best = best.min(v);
        if v <= -1e3 {
            status = MinimizeStatus::Diverging;
            break;
        }
    }
    Ok(MinimizeOutcome { alpha, status, inf_estimate: best, minimizer: None, trace })
}
