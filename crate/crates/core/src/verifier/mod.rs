//! Quadrature checks of individual inequalities on explicit radial test
//! functions.
//!
//! All volume integrals use the radial measure `|S^{n-1}| r^{n-1} dr` and all
//! boundary integrals the matching surface measure `|S^{n-1}| R^{n-1}`.

mod family;
mod soundness;
mod spline;

use serde::{Deserialize, Serialize};

use crate::best_constants::{closed_constants, ClosedKind};
use crate::error::{Error, Result};
use crate::quad::{integrate_adaptive, sphere_area};
use crate::radial_ode::SolutionTrace;
use crate::weight_dsl::{parse_weight, WeightExpr};

pub use family::{profile_family, FamilyMember};
pub use soundness::{soundness_sweep, CheckRecord, SoundnessSummary};
pub use spline::CubicSpline;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    Symbolic { u: WeightExpr, du: WeightExpr, ddu: WeightExpr },
    Spline { spline: CubicSpline },
    /// `u(r) = c * y(s r)` for `r < cutoff`, zero beyond.
    Truncated { trace: SolutionTrace, scale: f64, cutoff: f64, factor: f64 },
    /// Truncated logarithm on the unit ball normalised so that `∫|∇u|ⁿ = 1`.
    MoserLog { n: u32, k: f64, factor: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Smoothness {
    H10,
    H1,
    H2,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadialTestFunction {
    pub profile: Profile,
    pub support: f64,
    pub smoothness: Smoothness,
    pub boundary_value: f64,
    pub boundary_slope: f64,
}

impl RadialTestFunction {
    fn finish(profile: Profile, support: f64, smooth: bool) -> Result<Self> {
        if !(support > 0.0 && support.is_finite()) {
            return Err(Error::invalid(format!("support radius must be positive, got {support}")));
        }
        let mut f = RadialTestFunction {
            profile,
            support,
            smoothness: Smoothness::H1,
            boundary_value: 0.0,
            boundary_slope: 0.0,
        };
        let (u, du, _) = f.eval(support);
        f.boundary_value = u;
        f.boundary_slope = du;
        f.smoothness = if smooth {
            Smoothness::H2
        } else if f.vanishes_at_boundary() {
            Smoothness::H10
        } else {
            Smoothness::H1
        };
        Ok(f)
    }

    /// Symbolic profile on `[0, support]`.
    pub fn symbolic(u: WeightExpr, support: f64) -> Result<Self> {
        let du = u.differentiate(1)?;
        let ddu = u.differentiate(2)?;
        for r in [0.0, support * 1e-9, 0.5 * support, support] {
            if !u.eval(r).is_finite() || !du.eval(r).is_finite() {
                return Err(Error::invalid(format!("profile {u} is not finite at r = {r:e}")));
            }
        }
        Self::finish(Profile::Symbolic { u, du, ddu }, support, true)
    }

    pub fn parse(text: &str, support: f64) -> Result<Self> {
        Self::symbolic(parse_weight(text)?, support)
    }

    /// Clamped cubic spline through `(knots, values)` with `u'(0) = 0`;
    /// `knots` must start at 0.
    pub fn spline(knots: Vec<f64>, values: Vec<f64>, end_slope: f64) -> Result<Self> {
        if knots.first() != Some(&0.0) {
            return Err(Error::invalid("spline knots must start at r = 0"));
        }
        let support = *knots.last().unwrap();
        let spline = CubicSpline::clamped(knots, values, 0.0, end_slope)?;
        Self::finish(Profile::Spline { spline }, support, true)
    }

    /// `u(r) = y(scale * r)` for `r < cutoff` and 0 on `[cutoff, support]`.
    pub fn from_trace(trace: SolutionTrace, scale: f64, cutoff: f64, support: f64) -> Result<Self> {
        if !(cutoff > 0.0 && cutoff <= support && scale > 0.0) {
            return Err(Error::invalid("truncation needs 0 < cutoff <= support and a positive scale"));
        }
        let end = *trace.grid.last().unwrap();
        if scale * cutoff > end * (1.0 + 1e-12) {
            return Err(Error::invalid("trace does not reach the truncation radius"));
        }
        Self::finish(Profile::Truncated { trace, scale, cutoff, factor: 1.0 }, support, false)
    }

    /// `u_k = |S^{n-1}|^{-1/n} min(k, ln(1/r)) / k^{1/n}` on the unit ball.
    pub fn moser(n: u32, k: f64) -> Result<Self> {
        if n < 2 || !(k > 0.0) {
            return Err(Error::invalid("Moser profiles need n >= 2 and k > 0"));
        }
        Self::finish(Profile::MoserLog { n, k, factor: 1.0 }, 1.0, false)
    }

    /// Samples `(r, u)` as CSV.
    pub fn to_csv(&self, points: usize) -> String {
        let mut s = String::from("r,u\n");
        for i in 0..points {
            let r = self.support * i as f64 / (points - 1) as f64;
            s.push_str(&format!("{:e},{:e}\n", r, self.eval(r).0));
        }
        s
    }

    /// Reads `(r, u)` samples (first row a header) into a clamped spline.
    pub fn from_csv(text: &str, end_slope: f64) -> Result<Self> {
        let mut knots = Vec::new();
        let mut values = Vec::new();
        for (i, line) in text.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split(',');
            let parse = |p: Option<&str>| -> Result<f64> {
                p.and_then(|x| x.trim().parse().ok())
                    .ok_or_else(|| Error::invalid(format!("bad CSV row {}: `{line}`", i + 1)))
            };
            knots.push(parse(parts.next())?);
            values.push(parse(parts.next())?);
        }
        Self::spline(knots, values, end_slope)
    }

    /// `(u, u', u'')`; `u''` is NaN for profiles without second derivatives.
    pub fn eval(&self, r: f64) -> (f64, f64, f64) {
        if r > self.support {
            return (0.0, 0.0, 0.0);
        }
        match &self.profile {
            Profile::Symbolic { u, du, ddu } => (u.eval(r), du.eval(r), ddu.eval(r)),
            Profile::Spline { spline } => spline.eval(r),
            Profile::Truncated { trace, scale, cutoff, factor } => {
                if r >= *cutoff {
                    return (0.0, 0.0, f64::NAN);
                }
                let x = (r * scale).max(trace.r0);
                let (y, dy) = trace.eval(x).unwrap_or((0.0, 0.0));
                let dy = if r * scale < trace.r0 { 0.0 } else { dy };
                (factor * y, factor * scale * dy, f64::NAN)
            }
            Profile::MoserLog { n, k, factor } => {
                let c = factor * sphere_area(*n).powf(-1.0 / *n as f64) * k.powf(-1.0 / *n as f64);
                if r <= (-k).exp() {
                    (c * k, 0.0, 0.0)
                } else {
                    (-c * r.ln(), -c / r, c / (r * r))
                }
            }
        }
    }

    pub fn has_second_derivative(&self) -> bool {
        self.smoothness == Smoothness::H2
    }

    pub fn vanishes_at_boundary(&self) -> bool {
        self.boundary_value.abs() <= 1e-12 * self.sup_norm().max(f64::MIN_POSITIVE)
    }

    fn sup_norm(&self) -> f64 {
        (0..=256).map(|i| self.eval(self.support * i as f64 / 256.0).0.abs()).fold(0.0, f64::max)
    }

    /// `c * u`.
    pub fn scaled(&self, c: f64) -> Self {
        let profile = match &self.profile {
            Profile::Symbolic { u, du, ddu } => Profile::Symbolic { u: u.scaled(c), du: du.scaled(c), ddu: ddu.scaled(c) },
            Profile::Spline { spline } => Profile::Spline { spline: spline.scaled(c) },
            Profile::Truncated { trace, scale, cutoff, factor } => {
                Profile::Truncated { trace: trace.clone(), scale: *scale, cutoff: *cutoff, factor: factor * c }
            }
            Profile::MoserLog { n, k, factor } => Profile::MoserLog { n: *n, k: *k, factor: factor * c },
        };
        RadialTestFunction {
            profile,
            support: self.support,
            smoothness: self.smoothness,
            boundary_value: c * self.boundary_value,
            boundary_slope: c * self.boundary_slope,
        }
    }

    pub(crate) fn breakpoints(&self) -> Vec<f64> {
        let mut b = match &self.profile {
            Profile::Spline { spline } => spline.knots().to_vec(),
            Profile::Truncated { cutoff, .. } => vec![0.0, 0.25 * cutoff, 0.5 * cutoff, *cutoff, self.support],
            Profile::MoserLog { k, .. } => vec![0.0, (-k).exp(), self.support],
            Profile::Symbolic { .. } => [0.0, 0.125, 0.25, 0.5, 0.75, 1.0].iter().map(|f| f * self.support).collect(),
        };
        b.dedup();
        b
    }
}

/// A quadrature value with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

impl std::ops::Add for Integral {
    type Output = Integral;
    fn add(self, o: Integral) -> Integral {
        Integral { value: self.value + o.value, error: self.error + o.error }
    }
}

impl Integral {
    fn times(self, c: f64) -> Integral {
        Integral { value: c * self.value, error: c.abs() * self.error }
    }
}

/// Log-window depth below the first breakpoint.
const LOG_DEPTH: f64 = 150.0;

/// `|S^{n-1}| ∫_0^R f(r) r^{n-1} dr` split at the profile's breakpoints.
pub(crate) fn radial_integral<F: Fn(f64) -> f64>(f: F, n: u32, breaks: &[f64]) -> Result<Integral> {
    let nf = n as f64;
    let b1 = breaks[1];
    // First panel in s = ln(r / b1), so that r^{n-1} dr = r^n ds.
    let g = |s: f64| {
        let r = b1 * s.exp();
        let v = f(r);
        if v == 0.0 {
            0.0
        } else {
            v * r.powf(nf)
        }
    };
    let head = integrate_adaptive(&g, -LOG_DEPTH, 0.0, 1e-15, 1e-12);
    if !head.value.is_finite() {
        return Err(Error::numerical("integrand is not finite near the origin"));
    }
    // Tail beyond the window from a power-law fit g ~ A |s|^{-p}.
    let (g1, g2) = (g(-LOG_DEPTH), g(-LOG_DEPTH / 2.0));
    let mut tail = 0.0;
    if g1 != 0.0 {
        let p = (g2 / g1).abs().ln() / 2f64.ln();
        if !(p > 1.05) && g1.abs() > 1e-14 * head.value.abs().max(1e-300) {
            return Err(Error::numerical(format!(
                "integral diverges at the origin (integrand decays like |ln r|^-{p:.3})"
            )));
        }
        if p.is_finite() && p > 1.05 {
            tail = g1 * LOG_DEPTH / (p - 1.0);
        }
    }
    let mut total = Integral { value: head.value + tail, error: head.error + 0.1 * tail.abs() };
    if !head.converged {
        total.error += head.value.abs() * 1e-6;
    }
    for w in breaks[1..].windows(2) {
        let q = integrate_adaptive(|r| f(r) * r.powf(nf - 1.0), w[0], w[1], 1e-15, 1e-12);
        if !q.value.is_finite() {
            return Err(Error::numerical(format!("integrand is not finite on [{:e}, {:e}]", w[0], w[1])));
        }
        total = total + Integral { value: q.value, error: q.error };
    }
    total.error += 1e-14 * total.value.abs();
    Ok(total.times(sphere_area(n)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedIntegrals {
    /// `∫ V |∇u|²`
    pub gradient: Integral,
    /// `∫ V u²`
    pub mass: Integral,
    /// `∫ V |Δu|²`; `None` without second derivatives or when it diverges.
    pub laplacian: Option<Integral>,
}

fn laplacian(u: &RadialTestFunction, n: u32, r: f64) -> f64 {
    let (_, du, ddu) = u.eval(r);
    ddu + (n as f64 - 1.0) * du / r
}

/// `∫V|∇u|²`, `∫V u²` and (when available) `∫V|Δu|²` over the support.
pub fn weighted_integrals(u: &RadialTestFunction, v: &WeightExpr, n: u32) -> Result<WeightedIntegrals> {
    let b = u.breakpoints();
    let gradient = radial_integral(|r| v.eval(r) * u.eval(r).1.powi(2), n, &b)?;
    let mass = radial_integral(|r| v.eval(r) * u.eval(r).0.powi(2), n, &b)?;
    let laplacian = if u.has_second_derivative() {
        radial_integral(|r| v.eval(r) * laplacian(u, n, r).powi(2), n, &b).ok()
    } else {
        None
    };
    Ok(WeightedIntegrals { gradient, mass, laplacian })
}

/// Both sides of an inequality `lhs >= rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    /// Quadrature error bound on the margin, including a 1e-14 rounding floor.
    pub error: f64,
    pub pass: bool,
    pub note: Option<String>,
}

impl CheckOutcome {
    fn new(lhs: Integral, rhs: Integral) -> Self {
        let margin = lhs.value - rhs.value;
        let error = lhs.error + rhs.error + 1e-14 * (lhs.value.abs() + rhs.value.abs());
        CheckOutcome { lhs: lhs.value, rhs: rhs.value, margin, error, pass: margin >= -error, note: None }
    }

    /// Outcome for `lhs >= rhs` with a caller-supplied error bound.
    pub fn from_values(lhs: f64, rhs: f64, error: f64) -> Self {
        CheckOutcome::new(Integral { value: lhs, error }, Integral { value: rhs, error: 0.0 })
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

fn check_support(u: &RadialTestFunction, radius: f64) -> Result<()> {
    if u.support > radius * (1.0 + 1e-12) {
        return Err(Error::invalid(format!("test function support {} exceeds R = {radius}", u.support)));
    }
    Ok(())
}

fn require_h10(u: &RadialTestFunction) -> Result<()> {
    if !u.vanishes_at_boundary() {
        return Err(Error::invalid(format!(
            "test function must vanish at its support radius (u(R) = {:e})",
            u.boundary_value
        )));
    }
    Ok(())
}

fn require_h20(u: &RadialTestFunction) -> Result<()> {
    require_h10(u)?;
    if !u.has_second_derivative() {
        return Err(Error::invalid("test function has no second derivative"));
    }
    if u.boundary_slope.abs() > 1e-10 * u.sup_norm().max(f64::MIN_POSITIVE) / u.support {
        return Err(Error::invalid(format!("u'(R) = {:e} must vanish for compact support", u.boundary_slope)));
    }
    Ok(())
}

/// `∫|∇u|² >= (n-2)²/4 ∫u²/r² + ∫P u²`.
pub fn check_improved_hardy(p: &WeightExpr, u: &RadialTestFunction, n: u32, radius: f64) -> Result<CheckOutcome> {
    check_support(u, radius)?;
    require_h10(u)?;
    let mu = (n as f64 - 2.0).powi(2) / 4.0;
    let b = u.breakpoints();
    let lhs = radial_integral(|r| u.eval(r).1.powi(2), n, &b)?;
    let rhs = radial_integral(|r| (mu / (r * r) + p.eval(r)) * u.eval(r).0.powi(2), n, &b)?;
    Ok(CheckOutcome::new(lhs, rhs))
}

fn rellich_parts(v: &WeightExpr, w: &WeightExpr, u: &RadialTestFunction, n: u32) -> Result<(Integral, Integral)> {
    if !u.has_second_derivative() {
        return Err(Error::invalid("test function has no second derivative"));
    }
    let dv = v.differentiate(1)?;
    let b = u.breakpoints();
    let nf = n as f64;
    let lhs = radial_integral(|r| v.eval(r) * laplacian(u, n, r).powi(2), n, &b)?;
    let rhs = radial_integral(
        |r| {
            let du = u.eval(r).1;
            if du == 0.0 {
                return 0.0;
            }
            (w.eval(r) + (nf - 1.0) * (v.eval(r) / (r * r) - dv.eval(r) / r)) * du * du
        },
        n,
        &b,
    )?;
    Ok((lhs, rhs))
}

/// `∫V|Δu|² >= ∫W|∇u|² + (n-1)∫(V/r² - V'/r)|∇u|²` for radial `u`.
pub fn check_hardy_rellich_radial(
    v: &WeightExpr,
    w: &WeightExpr,
    u: &RadialTestFunction,
    n: u32,
    radius: f64,
) -> Result<CheckOutcome> {
    check_support(u, radius)?;
    require_h20(u)?;
    let (lhs, rhs) = rellich_parts(v, w, u, n)?;
    Ok(CheckOutcome::new(lhs, rhs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryForm {
    /// `∫V|∇u|² >= ∫W u² - θ ∫_{∂B} u²`.
    FirstOrder,
    /// Radial `H²` form with boundary coefficient `((n-1) - θ) V(R)`.
    SecondOrder,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryOutcome {
    /// Smallest admissible θ ≥ 0, or `None` when no finite θ works.
    pub theta: Option<f64>,
    /// The inequality evaluated at `theta` (at θ = 0 when none exists).
    pub outcome: CheckOutcome,
    pub reading: Option<String>,
}

/// Smallest `θ >= 0` (to 1e-6) for which the boundary-term inequality holds.
pub fn check_boundary_terms(
    v: &WeightExpr,
    w: &WeightExpr,
    u: &RadialTestFunction,
    n: u32,
    radius: f64,
    form: BoundaryForm,
) -> Result<BoundaryOutcome> {
    check_support(u, radius)?;
    let area = sphere_area(n) * u.support.powi(n as i32 - 1);
    // Inequality as lhs(θ) >= rhs(θ) = base + θ * slope; returns (lhs, base, slope).
    let (lhs, base, slope, reading) = match form {
        BoundaryForm::FirstOrder => {
            let b = u.breakpoints();
            let lhs = radial_integral(|r| v.eval(r) * u.eval(r).1.powi(2), n, &b)?;
            let rhs = radial_integral(|r| w.eval(r) * u.eval(r).0.powi(2), n, &b)?;
            let s = area * u.boundary_value.powi(2);
            (lhs, rhs, -s, None)
        }
        BoundaryForm::SecondOrder => {
            let (lhs, rhs) = rellich_parts(v, w, u, n)?;
            let s = area * u.boundary_slope.powi(2) * v.eval(u.support);
            let coef = (n as f64 - 1.0) * s;
            (
                lhs,
                rhs + Integral { value: coef, error: 1e-14 * coef.abs() },
                -s,
                Some("boundary coefficient read as ((n-1) - theta) * V(R)".to_string()),
            )
        }
    };
    let at = |theta: f64| {
        let rhs = Integral { value: base.value + theta * slope, error: base.error };
        CheckOutcome::new(lhs, rhs)
    };
    let zero = at(0.0);
    let with_reading = |mut o: BoundaryOutcome| {
        o.reading = reading.clone();
        o
    };
    if zero.pass {
        return Ok(with_reading(BoundaryOutcome { theta: Some(0.0), outcome: zero, reading: None }));
    }
    if !(slope < 0.0) {
        let note = "no finite theta: the boundary term vanishes for this u";
        return Ok(with_reading(BoundaryOutcome { theta: None, outcome: zero.with_note(note), reading: None }));
    }
    let mut hi = 1.0;
    while !at(hi).pass {
        hi *= 2.0;
        if hi > 1e300 {
            return Ok(with_reading(BoundaryOutcome { theta: None, outcome: zero, reading: None }));
        }
    }
    let mut lo = 0.0;
    while hi - lo > 1e-6 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if at(mid).pass {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(with_reading(BoundaryOutcome { theta: Some(hi), outcome: at(hi), reading: None }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EWeightMode {
    Interior,
    Boundary,
}

/// `∫|∇u|² >= ¼∫(|∇E|²/E²) u²`, plus `½∫u²/E dμ` with `dμ = -ΔE dx` in
/// boundary mode.
pub fn check_e_weight(e: &WeightExpr, mode: EWeightMode, u: &RadialTestFunction, n: u32) -> Result<CheckOutcome> {
    require_h10(u)?;
    let radius = u.support;
    let de = e.differentiate(1)?;
    let dde = e.differentiate(2)?;
    let nf = n as f64;
    let neg_lap = |r: f64| -(dde.eval(r) + (nf - 1.0) * de.eval(r) / r);
    let (emin, at) = e.min_on_log_grid(radius * 1e-8, radius * (1.0 - 1e-9), 1000);
    if !(emin > 0.0) {
        return Err(Error::invalid(format!("E must be positive inside the ball (E({at:e}) = {emin:e})")));
    }
    match mode {
        EWeightMode::Interior => {
            if !(e.singular_order > 0.0) {
                return Err(Error::invalid(format!("interior mode needs E -> +inf at the origin; {e} stays bounded")));
            }
        }
        EWeightMode::Boundary => {
            let scale = e.eval(0.5 * radius).abs();
            if e.eval(radius).abs() > 1e-12 * scale {
                return Err(Error::invalid(format!("boundary mode needs E(R) = 0, got {:e}", e.eval(radius))));
            }
            for r in crate::weight_dsl::log_grid(radius * 1e-6, radius * (1.0 - 1e-9), 1000) {
                let m = neg_lap(r);
                if m < -1e-12 * (dde.eval(r).abs() + (nf - 1.0) * (de.eval(r) / r).abs()) {
                    return Err(Error::invalid(format!("-ΔE is negative at r = {r:e}; dμ must be a positive measure")));
                }
            }
        }
    }
    let b = u.breakpoints();
    let lhs = radial_integral(|r| u.eval(r).1.powi(2), n, &b)?;
    let rhs = radial_integral(
        |r| {
            let u2 = u.eval(r).0.powi(2);
            if u2 == 0.0 {
                return 0.0;
            }
            let ev = e.eval(r);
            let hardy = 0.25 * (de.eval(r) / ev).powi(2);
            match mode {
                EWeightMode::Interior => hardy * u2,
                EWeightMode::Boundary => (hardy + 0.5 * neg_lap(r) / ev) * u2,
            }
        },
        n,
        &b,
    )?;
    Ok(CheckOutcome::new(lhs, rhs))
}

/// `∫|∇u|² >= (k-2)²/4 ∫u²/d²` with `d = |x|` (the point case `k = n`).
pub fn check_distance_hardy(k: u32, u: &RadialTestFunction, n: u32, radius: f64) -> Result<CheckOutcome> {
    let c = closed_constants(&ClosedKind::Codimension { k }, n)?;
    if k != n {
        return Err(Error::Unsupported(format!(
            "radial test functions only realise the point case k = n (got k = {k}, n = {n})"
        )));
    }
    check_support(u, radius)?;
    require_h10(u)?;
    let b = u.breakpoints();
    let lhs = radial_integral(|r| u.eval(r).1.powi(2), n, &b)?;
    let rhs = radial_integral(|r| c * u.eval(r).0.powi(2) / (r * r), n, &b)?;
    Ok(CheckOutcome::new(lhs, rhs))
}

/// One-dimensional boundary form on `(0, 1)`: `∫u'² >= ¼∫u²/d²` with
/// `d = min(x, 1-x)`; the profile variable `r` is read as `x`.
pub fn check_distance_hardy_interval(u: &RadialTestFunction) -> Result<CheckOutcome> {
    if (u.support - 1.0).abs() > 1e-12 {
        return Err(Error::invalid("interval form expects a profile on [0, 1]"));
    }
    let scale = u.sup_norm().max(f64::MIN_POSITIVE);
    if u.eval(0.0).0.abs() > 1e-12 * scale || u.boundary_value.abs() > 1e-12 * scale {
        return Err(Error::invalid("interval form needs u(0) = u(1) = 0"));
    }
    let piece = |f: &dyn Fn(f64) -> f64| -> Integral {
        let a = integrate_adaptive(f, 0.0, 0.5, 1e-15, 1e-13);
        let b = integrate_adaptive(f, 0.5, 1.0, 1e-15, 1e-13);
        Integral { value: a.value + b.value, error: a.error + b.error + 1e-14 * (a.value + b.value).abs() }
    };
    let lhs = piece(&|x| u.eval(x).1.powi(2));
    let rhs = piece(&|x| {
        let d = x.min(1.0 - x);
        0.25 * u.eval(x).0.powi(2) / (d * d)
    });
    Ok(CheckOutcome::new(lhs, rhs).with_note("interval (0,1), d = min(x, 1-x)"))
}

#[cfg(test)]
mod tests;
