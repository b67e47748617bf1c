//! HI-potential and Bessel-pair certification, shifted pairs and the
//! pointwise premises of the non-radial Hardy–Rellich improvements.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radial_ode::{certify_positive, PositivityCertificate, RadialCoefficients, DEFAULT_TOL};
use crate::weight_dsl::{builtin, log_grid, Builtin, Node, WeightExpr};

const POINTWISE_SLACK: f64 = 1e-12;
const POINTWISE_POINTS: usize = 10_000;

/// A candidate Bessel pair `(V, W)` in dimension `n` on `(0, R)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairSpec {
    pub v: WeightExpr,
    pub w: WeightExpr,
    pub n: u32,
    pub radius: f64,
    pub lambda: Option<f64>,
}

impl PairSpec {
    pub fn new(v: WeightExpr, w: WeightExpr, n: u32, radius: f64, lambda: Option<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::invalid(format!("radius must be positive and finite, got {radius}")));
        }
        if let Some(l) = lambda {
            check_lambda(l, n)?;
        }
        let (vmin, at) = v.min_on_log_grid(radius * 1e-8, radius * (1.0 - 1e-9), 1000);
        if !(vmin > 0.0) {
            return Err(Error::invalid(format!("V = {v} vanishes or is negative near r = {at:.6e}")));
        }
        Ok(PairSpec { v, w, n, radius, lambda })
    }

    /// The couple `(1, (n-2)^2/4 r^{-2} + P)`.
    pub fn hardy_shift(n: u32, p: &WeightExpr, radius: f64) -> Result<Self> {
        let c = (n as f64 - 2.0).powi(2) / 4.0;
        let w = WeightExpr::new(Node::add(Node::mul(Node::Num(c), Node::pow(Node::R, -2.0)), p.ast.clone()))
            .with_domain(p.domain_max);
        PairSpec::new(WeightExpr::constant(1.0), w, n, radius, None)
    }
}

fn check_lambda(lambda: f64, n: u32) -> Result<()> {
    let top = n as f64 - 2.0;
    if !(0.0..=top).contains(&lambda) {
        return Err(Error::invalid(format!("lambda must satisfy 0 <= lambda <= n-2 = {top}, got {lambda}")));
    }
    Ok(())
}

/// ODE `y'' + y'/r + P y = 0` after validating that `P` is an admissible
/// HI-potential candidate on `(0, R)`.
pub fn hi_coefficients(p: &WeightExpr, radius: f64) -> Result<RadialCoefficients> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::invalid(format!("radius must be positive and finite, got {radius}")));
    }
    p.ensure_nonnegative(radius, "potential P")?;
    if p.singular_order >= 2.0 - 1e-9 && !(p.log_power < 0.0 && p.singular_order <= 2.0 + 1e-9) {
        return Err(Error::Unsupported(format!(
            "potential {p} has singular order {} at the origin; orders >= 2 are only accepted with logarithmic damping",
            p.singular_order
        )));
    }
    RadialCoefficients::radial_laplacian(2, p.clone(), radius)
}

/// ODE `y'' + ((n-1)/r + V'/V) y' + (W/V) y = 0` for a pair.
pub fn pair_coefficients(spec: &PairSpec) -> Result<RadialCoefficients> {
    let dv = spec.v.differentiate(1)?;
    let a = Node::add(
        Node::div(Node::Num(spec.n as f64 - 1.0), Node::R),
        Node::div(dv.ast, spec.v.ast.clone()),
    );
    let b = Node::div(spec.w.ast.clone(), spec.v.ast.clone());
    RadialCoefficients::new(WeightExpr::new(a), WeightExpr::new(b), spec.n, spec.radius)
}

pub fn is_hi_potential(p: &WeightExpr, radius: f64) -> Result<PositivityCertificate> {
    certify_positive(&hi_coefficients(p, radius)?, DEFAULT_TOL)
}

pub fn is_bessel_pair(spec: &PairSpec) -> Result<PositivityCertificate> {
    certify_positive(&pair_coefficients(spec)?, DEFAULT_TOL)
}

/// `(r^{-λ}, ((n-λ-2)/2)^2 r^{-λ-2} + r^{-λ} P)` on `P`'s domain (or `(0,1)`
/// when `P` has none).
pub fn shifted_pair(lambda: f64, n: u32, p: &WeightExpr) -> Result<PairSpec> {
    check_lambda(lambda, n)?;
    let w = builtin(&Builtin::PairShift { lambda, n, p: Box::new(p.clone()) })?;
    let radius = if p.domain_max.is_finite() { p.domain_max } else { 1.0 };
    PairSpec::new(WeightExpr::monomial(-lambda), w, n, radius, Some(lambda))
}

/// Outcome of a pointwise inequality scanned on a log grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointwiseCheck {
    pub holds: bool,
    /// First grid point where the inequality fails.
    pub violation: Option<f64>,
    /// Smallest value seen, normalised by the magnitude of its terms.
    pub min_relative: f64,
    pub grid_lo: f64,
    pub grid_hi: f64,
    pub grid_points: usize,
    pub slack: f64,
}

fn scan<F: Fn(f64) -> (f64, f64)>(lo: f64, hi: f64, f: F) -> PointwiseCheck {
    let mut violation = None;
    let mut min_relative = f64::INFINITY;
    for r in log_grid(lo, hi, POINTWISE_POINTS) {
        let (value, scale) = f(r);
        let rel = if scale > 0.0 { value / scale } else { value };
        if rel.is_nan() || value < -POINTWISE_SLACK * scale.max(1.0) {
            violation.get_or_insert(r);
        }
        if rel < min_relative || rel.is_nan() {
            min_relative = rel;
        }
    }
    PointwiseCheck {
        holds: violation.is_none(),
        violation,
        min_relative,
        grid_lo: lo,
        grid_hi: hi,
        grid_points: POINTWISE_POINTS,
        slack: POINTWISE_SLACK,
    }
}

/// Checks `W - 2V/r^2 + 2V'/r - V'' >= 0` on `[1e-6 R, R)`.
pub fn extraordinaire_check(spec: &PairSpec) -> Result<PointwiseCheck> {
    let dv = spec.v.differentiate(1)?;
    let ddv = spec.v.differentiate(2)?;
    let hi = spec.radius * (1.0 - 1e-9);
    Ok(scan(1e-6 * spec.radius, hi, |r| {
        let terms = [spec.w.eval(r), -2.0 * spec.v.eval(r) / (r * r), 2.0 * dv.eval(r) / r, -ddv.eval(r)];
        (terms.iter().sum(), terms.iter().map(|t| t.abs()).sum())
    }))
}

/// Checks that `f = P'/P - λ/r` is non-negative with `r f(r) -> 0`.
pub fn rellich_premise_check(p: &WeightExpr, lambda: f64) -> Result<PointwiseCheck> {
    let dp = p.differentiate(1)?;
    let radius = if p.domain_max.is_finite() { p.domain_max } else { 1.0 };
    let f = |r: f64| {
        let a = dp.eval(r) / p.eval(r);
        let b = lambda / r;
        (a - b, a.abs() + b.abs())
    };
    let mut check = scan(1e-6 * radius, radius * (1.0 - 1e-9), f);
    let r_small = 1e-6 * radius.min(1.0);
    let (fv, _) = f(r_small);
    if !((r_small * fv).abs() < 1e-3) {
        check.holds = false;
        check.violation.get_or_insert(r_small);
    }
    Ok(check)
}

#[cfg(test)]
mod tests;
