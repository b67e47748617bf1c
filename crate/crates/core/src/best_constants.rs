//! Best constants: oscillation bisection, discretised Rayleigh quotients,
//! closed forms and the Hardy–Sobolev quotient on a parametric family.
//!
//! Rayleigh quotients are discretised in `t = ln(r/R)` on `[-L, 0]` after the
//! substitution `u = e^{-γt} φ` (`γ = (n-2k)/2` for derivative order `k`),
//! which turns the singular measure `r^{n-1} dr` into `dt`. Order 1 uses
//! piecewise-linear elements, order 2 cubic Hermite elements; both are
//! conforming, so discrete values bound the continuous infimum from above.

use serde::{Deserialize, Serialize};

use crate::banded::SymBanded;
use crate::bessel_certify::hi_coefficients;
use crate::error::{Error, Result};
use crate::quad::{golden_min, integrate_adaptive, sphere_area, GaussRule};
use crate::radial_ode::{certify_positive, DEFAULT_TOL};
use crate::weight_dsl::{Node, WeightExpr};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    OscillationBisection,
    RayleighEig,
    ClosedForm,
    ParametricFamily,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub rayleigh_value: f64,
    pub relative_gap: f64,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantResult {
    pub value: f64,
    pub method: Method,
    pub bracket: Option<[f64; 2]>,
    pub eigen_residual: Option<f64>,
    /// `(∫|∇u|² / ∫u²)^{1/2}` of the discrete minimiser.
    pub attainment_diagnostic: Option<f64>,
    pub grid_size: Option<usize>,
    pub log_span: Option<f64>,
    pub cross_check: Option<CrossCheck>,
}

impl ConstantResult {
    fn closed(value: f64) -> Self {
        ConstantResult {
            value,
            method: Method::ClosedForm,
            bracket: None,
            eigen_residual: None,
            attainment_diagnostic: None,
            grid_size: None,
            log_span: None,
            cross_check: None,
        }
    }
}

const BETA_REL_WIDTH: f64 = 1e-7;
const CROSS_CHECK_N: usize = 16384;
const CROSS_CHECK_SPAN: f64 = 340.0;

/// `sup { c : y'' + y'/r + c P y = 0 has a positive solution on (0, R) }`.
///
/// Inconclusive certificates count as oscillatory, so the returned bracket
/// never overstates the constant.
pub fn beta_constant(p: &WeightExpr, n: u32, radius: f64) -> Result<ConstantResult> {
    if n == 0 {
        return Err(Error::invalid("dimension must be at least 1"));
    }
    if p.is_identically_zero() {
        return Err(Error::invalid("beta is undefined for P = 0 (the quotient has a vanishing denominator)"));
    }
    hi_coefficients(p, radius)?;
    let positive = |c: f64| -> Result<bool> {
        Ok(certify_positive(&hi_coefficients(&p.scaled(c), radius)?, DEFAULT_TOL)?.is_positive())
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    while positive(hi)? {
        lo = hi;
        hi *= 2.0;
        if hi > 2f64.powi(60) {
            return Err(Error::numerical(format!("beta bracket exceeded 2^60 for P = {p}")));
        }
    }
    while hi - lo > BETA_REL_WIDTH * lo.max(f64::MIN_POSITIVE) {
        let mid = 0.5 * (lo + hi);
        if positive(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
        if lo == 0.0 && hi < 1e-300 {
            return Err(Error::numerical("beta bracket collapsed to zero"));
        }
    }
    let value = 0.5 * (lo + hi);
    let cross_check = if n >= 3 {
        let form = QuadraticForm::improved_hardy(n, p, radius);
        match rayleigh_minimize_span(&form, CROSS_CHECK_N, CROSS_CHECK_SPAN) {
            Ok(r) => {
                let gap = (r.value - value).abs() / value;
                Some(CrossCheck { rayleigh_value: r.value, relative_gap: gap, agrees: gap <= 1e-2 })
            }
            Err(_) => None,
        }
    } else {
        None
    };
    Ok(ConstantResult {
        value,
        method: Method::OscillationBisection,
        bracket: Some([lo, hi]),
        eigen_residual: None,
        attainment_diagnostic: None,
        grid_size: None,
        log_span: None,
        cross_check,
    })
}

/// Radial quotient `(∫|∇^k u|² + ∫V u²) / ∫D u²` with measure `r^{n-1} dr`
/// over profiles vanishing at `R` (derivative order `k` = 1) or clamped at
/// both ends of the log window (`k` = 2, `∇²` meaning the radial Laplacian).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuadraticForm {
    pub order: u32,
    pub n: u32,
    pub radius: f64,
    pub potential: Option<WeightExpr>,
    pub denominator: WeightExpr,
}

impl QuadraticForm {
    /// `∫|∇u|² / ∫u²/r²`.
    pub fn hardy(n: u32, radius: f64) -> Self {
        QuadraticForm { order: 1, n, radius, potential: None, denominator: WeightExpr::monomial(-2.0) }
    }

    /// `∫|Δu|² / ∫u²/r⁴`.
    pub fn hardy_rellich(n: u32, radius: f64) -> Self {
        QuadraticForm { order: 2, n, radius, potential: None, denominator: WeightExpr::monomial(-4.0) }
    }

    /// `(∫|∇u|² - (n-2)²/4 ∫u²/r²) / ∫P u²`.
    pub fn improved_hardy(n: u32, p: &WeightExpr, radius: f64) -> Self {
        let mu = (n as f64 - 2.0).powi(2) / 4.0;
        let v = WeightExpr::new(Node::mul(Node::Num(-mu), Node::pow(Node::R, -2.0)));
        QuadraticForm { order: 1, n, radius, potential: Some(v), denominator: p.clone() }
    }

    fn gamma(&self) -> f64 {
        (self.n as f64 - 2.0 * self.order as f64) / 2.0
    }
}

/// Default log-window length for an `N`-element grid.
pub fn default_log_span(grid: usize) -> f64 {
    1.875 * (grid as f64).sqrt()
}

pub fn rayleigh_minimize(form: &QuadraticForm, grid: usize) -> Result<ConstantResult> {
    rayleigh_minimize_span(form, grid, default_log_span(grid))
}

struct Assembled {
    k: SymBanded,
    m: SymBanded,
}

fn local_basis(order: u32, s: f64, h: f64) -> ([f64; 4], [f64; 4], [f64; 4], usize) {
    if order == 1 {
        ([1.0 - s, s, 0.0, 0.0], [-1.0 / h, 1.0 / h, 0.0, 0.0], [0.0; 4], 2)
    } else {
        let (s2, s3) = (s * s, s * s * s);
        let v = [1.0 - 3.0 * s2 + 2.0 * s3, h * (s - 2.0 * s2 + s3), 3.0 * s2 - 2.0 * s3, h * (s3 - s2)];
        let d = [(-6.0 * s + 6.0 * s2) / h, 1.0 - 4.0 * s + 3.0 * s2, (6.0 * s - 6.0 * s2) / h, 3.0 * s2 - 2.0 * s];
        let dd = [(-6.0 + 12.0 * s) / (h * h), (-4.0 + 6.0 * s) / h, (6.0 - 12.0 * s) / (h * h), (6.0 * s - 2.0) / h];
        (v, d, dd, 4)
    }
}

/// Global dof of local basis function `a` on element `e`, if not constrained.
fn dof(order: u32, grid: usize, e: usize, a: usize) -> Option<usize> {
    if order == 1 {
        let node = e + a;
        (node >= 1 && node < grid).then(|| node - 1)
    } else {
        let node = e + a / 2;
        (node >= 1 && node < grid).then(|| 2 * (node - 1) + a % 2)
    }
}

fn assemble(form: &QuadraticForm, grid: usize, span: f64) -> Result<Assembled> {
    let dofs = if form.order == 1 { grid - 1 } else { 2 * (grid - 1) };
    let bw = if form.order == 1 { 1 } else { 3 };
    let mut k = SymBanded::zeros(dofs, bw);
    let mut m = SymBanded::zeros(dofs, bw);
    let gamma = form.gamma();
    let nf = form.n as f64;
    let (c1, c0) = (nf - 2.0 - 2.0 * gamma, gamma * gamma - (nf - 2.0) * gamma);
    let pw = 2 * form.order as i32;
    let h = span / grid as f64;
    let rule = GaussRule::new(5);
    for e in 0..grid {
        let t0 = -span + e as f64 * h;
        for (t, wq) in rule.points(t0, t0 + h) {
            let r = form.radius * t.exp();
            let rp = r.powi(pw);
            let wv = form.potential.as_ref().map_or(0.0, |v| v.eval(r) * rp);
            let wd = form.denominator.eval(r) * rp;
            if !wv.is_finite() || !wd.is_finite() {
                return Err(Error::numerical(format!(
                    "weight not finite at r = {r:e}: the singularity is not integrable for this discretisation"
                )));
            }
            if !(wd > 0.0) {
                return Err(Error::invalid(format!("denominator weight must be positive, got {wd:e} at r = {r:e}")));
            }
            let (v, d, dd, nb) = local_basis(form.order, (t - t0) / h, h);
            let op: Vec<f64> = (0..nb)
                .map(|a| if form.order == 1 { d[a] - gamma * v[a] } else { dd[a] + c1 * d[a] + c0 * v[a] })
                .collect();
            for a in 0..nb {
                let Some(i) = dof(form.order, grid, e, a) else { continue };
                for b in 0..=a {
                    let Some(j) = dof(form.order, grid, e, b) else { continue };
                    k.add(i, j, wq * (op[a] * op[b] + wv * v[a] * v[b]));
                    m.add(i, j, wq * wd * v[a] * v[b]);
                }
            }
        }
    }
    Ok(Assembled { k, m })
}

fn count_below(a: &Assembled, sigma: f64) -> usize {
    let mut s = sigma;
    for _ in 0..8 {
        if let Some(f) = a.k.shifted(s, &a.m).ldlt() {
            return f.negative_pivots();
        }
        s += 1e-14 * s.abs().max(1e-300);
    }
    usize::MAX
}

/// Smallest generalized eigenvalue of the discretised quotient.
pub fn rayleigh_minimize_span(form: &QuadraticForm, grid: usize, span: f64) -> Result<ConstantResult> {
    if grid < 64 {
        return Err(Error::invalid(format!("grid size must be at least 64, got {grid}")));
    }
    if !(form.order == 1 || form.order == 2) {
        return Err(Error::invalid(format!("derivative order must be 1 or 2, got {}", form.order)));
    }
    if !(span > 0.0 && span.is_finite()) || !(form.radius > 0.0 && form.radius.is_finite()) {
        return Err(Error::invalid("log span and radius must be positive"));
    }
    let asm = assemble(form, grid, span)?;
    let mut lo = 0.0;
    while count_below(&asm, lo) > 0 {
        lo = if lo == 0.0 { -1.0 } else { 2.0 * lo };
        if lo < -1e300 {
            return Err(Error::numerical("quotient unbounded below"));
        }
    }
    let mut hi = 1.0;
    while count_below(&asm, hi) == 0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::numerical("no eigenvalue found"));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-13 * hi.abs().max(lo.abs()) || mid == lo || mid == hi {
            break;
        }
        if count_below(&asm, mid) == 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Inverse iteration just below the eigenvalue.
    let shift = lo - 1e-10 * lo.abs().max(1e-12);
    let f = asm
        .k
        .shifted(shift, &asm.m)
        .ldlt()
        .ok_or_else(|| Error::numerical("singular shifted matrix in inverse iteration"))?;
    let dim = asm.k.dim();
    let mut x: Vec<f64> = (0..dim).map(|i| 1.0 + 0.1 * ((i * 7919) % 13) as f64).collect();
    for _ in 0..6 {
        let y = f.solve(&asm.m.mul_vec(&x));
        let nrm = asm.m.quad_form(&y).sqrt();
        x = y.iter().map(|v| v / nrm).collect();
    }
    let value = asm.k.quad_form(&x) / asm.m.quad_form(&x);
    let kx = asm.k.mul_vec(&x);
    let mx = asm.m.mul_vec(&x);
    let res = kx.iter().zip(&mx).map(|(a, b)| (a - value * b).powi(2)).sum::<f64>().sqrt()
        / mx.iter().map(|b| b * b).sum::<f64>().sqrt();
    let diag = attainment(form, grid, span, &x);
    Ok(ConstantResult {
        value,
        method: Method::RayleighEig,
        bracket: Some([lo, hi]),
        eigen_residual: Some(res),
        attainment_diagnostic: Some(diag),
        grid_size: Some(grid),
        log_span: Some(span),
        cross_check: None,
    })
}

fn attainment(form: &QuadraticForm, grid: usize, span: f64, x: &[f64]) -> f64 {
    let gamma = form.gamma();
    let nf = form.n as f64;
    let h = span / grid as f64;
    let rule = GaussRule::new(5);
    let (mut grad, mut mass) = (0.0, 0.0);
    for e in 0..grid {
        let t0 = -span + e as f64 * h;
        for (t, wq) in rule.points(t0, t0 + h) {
            let (v, d, _, nb) = local_basis(form.order, (t - t0) / h, h);
            let (mut phi, mut dphi) = (0.0, 0.0);
            for a in 0..nb {
                if let Some(i) = dof(form.order, grid, e, a) {
                    phi += x[i] * v[a];
                    dphi += x[i] * d[a];
                }
            }
            grad += wq * (dphi - gamma * phi).powi(2) * ((nf - 2.0 - 2.0 * gamma) * t).exp();
            mass += wq * phi * phi * ((nf - 2.0 * gamma) * t).exp();
        }
    }
    (grad / mass).sqrt() / form.radius
}

/// Minimisers for `N, 2N, 4N, ...` (`doublings + 1` grids).
pub fn rayleigh_sequence(form: &QuadraticForm, start: usize, doublings: u32) -> Result<Vec<ConstantResult>> {
    (0..=doublings).map(|j| rayleigh_minimize(form, start << j)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClosedKind {
    /// `(n-2)²/4`, Hardy constant with the singularity inside the domain.
    Interior,
    /// `n²/4`, singularity on the boundary of a half-space.
    HalfSpace,
    /// `n²(n-4)²/16`.
    HardyRellich,
    /// `β (n² + (n-λ-2)²)/4`.
    Improvement { beta: f64, lambda: f64 },
    /// `1/4` for the distance to the boundary of a convex domain.
    BoundaryDistance,
    /// `(k-2)²/4` for the distance to a surface of co-dimension `k`.
    Codimension { k: u32 },
    /// `2*(s) = 2(n-s)/(n-2)`.
    HardySobolevExponent { s: f64 },
}

pub fn closed_constants(kind: &ClosedKind, n: u32) -> Result<f64> {
    let nf = n as f64;
    let need = |ok: bool, msg: &str| if ok { Ok(()) } else { Err(Error::invalid(msg.to_string())) };
    match kind {
        ClosedKind::Interior => {
            need(n >= 1, "n must be at least 1")?;
            Ok((nf - 2.0).powi(2) / 4.0)
        }
        ClosedKind::HalfSpace => {
            need(n >= 1, "n must be at least 1")?;
            Ok(nf * nf / 4.0)
        }
        ClosedKind::HardyRellich => {
            need(n >= 4, "the Hardy-Rellich constant is stated for n >= 4")?;
            Ok(nf * nf * (nf - 4.0).powi(2) / 16.0)
        }
        ClosedKind::Improvement { beta, lambda } => {
            need(*beta >= 0.0 && beta.is_finite(), "beta must be a non-negative number")?;
            need(*lambda >= 0.0 && *lambda < nf - 2.0, "lambda must satisfy 0 <= lambda < n-2")?;
            Ok(beta * (nf * nf + (nf - lambda - 2.0).powi(2)) / 4.0)
        }
        ClosedKind::BoundaryDistance => Ok(0.25),
        ClosedKind::Codimension { k } => {
            need(*k != 2, "co-dimension k = 2 is excluded")?;
            need(*k >= 1 && *k <= n, "co-dimension must satisfy 1 <= k <= n")?;
            Ok((*k as f64 - 2.0).powi(2) / 4.0)
        }
        ClosedKind::HardySobolevExponent { s } => {
            need(n >= 3, "n must be at least 3")?;
            need((0.0..2.0).contains(s), "s must lie in [0, 2)")?;
            Ok(2.0 * (nf - s) / (nf - 2.0))
        }
    }
}

/// Wraps a closed-form value as a [`ConstantResult`].
pub fn closed_constant_result(kind: &ClosedKind, n: u32) -> Result<ConstantResult> {
    closed_constants(kind, n).map(ConstantResult::closed)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardySobolevResult {
    pub value: f64,
    pub method: Method,
    pub best_t: f64,
    pub exponent: f64,
    /// `(t, quotient)` pairs in evaluation order.
    pub trace: Vec<(f64, f64)>,
}

fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

const HS_WINDOW: f64 = 120.0;

/// Whole-space quotient `∫|∇u|² / (∫|u|^{2*(s)} |x|^{-s})^{2/2*(s)}` for a
/// radial profile given as `x -> (ln u, r u'/u)` with `r = e^x`.
pub fn hardy_sobolev_quotient<F: Fn(f64) -> (f64, f64)>(n: u32, s: f64, profile: F, tol: f64) -> Result<f64> {
    let p = closed_constants(&ClosedKind::HardySobolevExponent { s }, n)?;
    let nf = n as f64;
    let num = integrate_adaptive(
        |x| {
            let (lu, g) = profile(x);
            (2.0 * lu + (nf - 2.0) * x).exp() * g * g
        },
        -HS_WINDOW,
        HS_WINDOW,
        0.0,
        tol,
    );
    let den = integrate_adaptive(|x| (p * profile(x).0 + (nf - s) * x).exp(), -HS_WINDOW, HS_WINDOW, 0.0, tol);
    if !num.converged || !den.converged {
        return Err(Error::numerical("Hardy-Sobolev quadrature did not converge"));
    }
    let omega = sphere_area(n);
    Ok(omega * num.value / (omega * den.value).powf(2.0 / p))
}

/// Profile `(1 + r^{(2-s)t})^{-(n-2)/((2-s)t)}` in the form used by
/// [`hardy_sobolev_quotient`].
pub fn hardy_sobolev_profile(n: u32, s: f64, t: f64) -> impl Fn(f64) -> (f64, f64) {
    let a = (2.0 - s) * t;
    let c = (n as f64 - 2.0) / a;
    move |x: f64| (-c * softplus(a * x), -(n as f64 - 2.0) * logistic(a * x))
}

pub fn hardy_sobolev_value(n: u32, s: f64) -> Result<HardySobolevResult> {
    hardy_sobolev_value_tol(n, s, 1e-11)
}

/// Minimises the quotient over the family parameter `t` by golden section.
pub fn hardy_sobolev_value_tol(n: u32, s: f64, tol: f64) -> Result<HardySobolevResult> {
    let exponent = closed_constants(&ClosedKind::HardySobolevExponent { s }, n)?;
    let mut trace = Vec::new();
    let mut failure = None;
    let (best_t, value) = golden_min(
        |t| match hardy_sobolev_quotient(n, s, hardy_sobolev_profile(n, s, t), tol) {
            Ok(v) => {
                trace.push((t, v));
                v
            }
            Err(e) => {
                failure.get_or_insert(e);
                f64::INFINITY
            }
        },
        0.25,
        4.0,
        1e-6,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(HardySobolevResult { value, method: Method::ParametricFamily, best_t, exponent, trace })
}

#[cfg(test)]
mod tests;
