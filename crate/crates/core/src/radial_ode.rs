//! Positivity certification for singular radial ODEs
//! `y'' + a(r) y' + b(r) y = 0` on `(0, R)`.
//!
//! The equation is integrated in `t = ln r` for `Z = r^{-k} y`, where `k` is
//! the principal Frobenius exponent at the origin:
//!
//! ```text
//! Z'' = (A - 2k) Z' + (A k - k^2 - B) Z,   A = 1 - r a(r),  B = r^2 b(r)
//! ```

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::weight_dsl::{Leading, Node, WeightExpr};

pub const DEFAULT_TOL: f64 = 1e-10;
const MAX_STEP: f64 = 0.5;
const SAFETY: f64 = 0.9;
const MAX_STEPS: usize = 2_000_000;
const PROBES: usize = 3;
const R0_FLOOR: f64 = 1e-150;

/// Coefficients of `y'' + a y' + b y = 0` on `(0, radius)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadialCoefficients {
    pub a: WeightExpr,
    pub b: WeightExpr,
    pub n: u32,
    pub radius: f64,
}

impl RadialCoefficients {
    pub fn new(a: WeightExpr, b: WeightExpr, n: u32, radius: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::invalid(format!("radius must be positive and finite, got {radius}")));
        }
        if a.singular_order > 1.0 + 1e-9 {
            return Err(Error::Unsupported(format!(
                "coefficient a = {} has singular order {} > 1 at the origin",
                a, a.singular_order
            )));
        }
        Ok(RadialCoefficients { a, b, n, radius })
    }

    /// `a = (n-1)/r`, the radial Laplacian in dimension `n`.
    pub fn radial_laplacian(n: u32, b: WeightExpr, radius: f64) -> Result<Self> {
        let a = WeightExpr::new(Node::div(Node::Num(n as f64 - 1.0), Node::R));
        RadialCoefficients::new(a, b, n, radius)
    }

    fn big_a(&self, r: f64) -> f64 {
        1.0 - r * self.a.eval(r)
    }

    fn big_b(&self, r: f64) -> f64 {
        r * r * self.b.eval(r)
    }
}

#[derive(Debug, Clone, Copy)]
struct Start {
    k: f64,
    r0: f64,
    dz0: f64,
}

/// `m` with `r a(r) -> m - 1` at the origin.
fn drift_index(c: &RadialCoefficients) -> Result<f64> {
    match c.a.leading() {
        Leading::Zero => Ok(1.0),
        Leading::Term { power, .. } if power > -1.0 + 1e-12 => Ok(1.0),
        Leading::Term { coef, log_power, .. } if log_power == 0.0 => Ok(1.0 + coef),
        Leading::Term { log_power, .. } if log_power < 0.0 => Ok(1.0),
        Leading::Term { .. } => Err(Error::Unsupported(format!("coefficient a = {} grows faster than 1/r", c.a))),
        Leading::Unknown => {
            let r = 1e-12 * c.radius;
            let v = r * c.a.eval(r);
            if v.is_finite() {
                Ok(1.0 + v)
            } else {
                Err(Error::Unsupported(format!("cannot resolve r*a(r) at the origin for a = {}", c.a)))
            }
        }
    }
}

fn frobenius_start(c: &RadialCoefficients) -> Result<Start> {
    let m = drift_index(c)?;
    let big_r = c.radius;
    let lead = c.b.leading();
    let s = match lead {
        Leading::Zero => 0.0,
        _ => c.b.singular_order,
    };
    let finite_at = |r: f64| c.big_a(r).is_finite() && c.big_b(r).is_finite();

    if s < 2.0 - 1e-9 {
        // Both exponents are 0 and 2 - m; the principal one is the larger.
        let k = (2.0 - m).max(0.0);
        let den = (k + 2.0 - s) * (k + m - s);
        let mut r0 = 1e-8 * big_r;
        if matches!(lead, Leading::Zero) {
            return Ok(Start { k, r0, dz0: 0.0 });
        }
        while r0 > R0_FLOOR * big_r && !((c.b.eval(r0) * r0 * r0 / den).abs() < 1e-10) {
            r0 *= 0.1;
        }
        while !finite_at(r0) && r0 < 1e-8 * big_r {
            r0 *= 10.0;
        }
        let dz0 = -c.big_b(r0) * (2.0 - s) / den;
        return Ok(Start { k, r0, dz0 });
    }
    if s > 2.0 + 1e-9 {
        return Err(Error::Unsupported(format!(
            "coefficient b = {} has singular order {s} > 2 (irregular singular point)",
            c.b
        )));
    }
    let (cc, damped) = match lead {
        Leading::Term { coef, log_power, .. } if log_power == 0.0 => (coef, false),
        Leading::Term { log_power, .. } if log_power < 0.0 => (0.0, true),
        _ => {
            return Err(Error::Unsupported(format!(
                "cannot resolve the r^-2 behaviour of b = {} at the origin",
                c.b
            )))
        }
    };
    let disc = (m - 2.0).powi(2) - 4.0 * cc;
    let k = 0.5 * ((2.0 - m) + disc.max(0.0).sqrt());
    let mut r0 = if damped { R0_FLOOR * big_r } else { 1e-8 * big_r };
    if !damped {
        while r0 > R0_FLOOR * big_r && !((c.big_b(r0) - cc).abs() <= 1e-10 * cc.abs().max(1.0)) {
            r0 *= 0.1;
        }
    }
    while !finite_at(r0) && r0 < 1e-8 * big_r {
        r0 *= 10.0;
    }
    // Quasi-static Riccati balance for w = Z'/Z with the residual forcing q.
    let a0 = 2.0 - m;
    let d = a0 - 2.0 * k;
    let q0 = (c.big_a(r0) - a0) * k - (c.big_b(r0) - cc);
    let t0 = (r0 / big_r).ln();
    let dz0 = if d.abs() > 1e-6 {
        -q0 / d
    } else {
        // Double root, so w' = -w^2 + q. A forcing with geometric decay
        // q0 e^{p (t - t0)} gives w ~ q0 / p; a log-damped forcing
        // -c / (4 (t - t*)^2) gives w = alpha / (t - t*), with c and t* read
        // off the slope of (-4q)^{-1/2}.
        let q = |t: f64| {
            let r = big_r * t.exp();
            (c.big_a(r) - a0) * k - (c.big_b(r) - cc)
        };
        let q1 = q(t0 + 1.0);
        let p = (q1 / q0).ln();
        if q0 == 0.0 || !p.is_finite() {
            0.0
        } else if p.abs() > 0.1 {
            q0 / p
        } else if q0 < 0.0 {
            let g = |v: f64| 1.0 / (-4.0 * v).sqrt();
            let slope = g(q1) - g(q0);
            let cl = 1.0 / (slope * slope);
            let dist = g(q0) / slope.abs();
            let alpha = 0.5 * (1.0 - (1.0 - cl).max(0.0).sqrt());
            -alpha / dist
        } else {
            0.0
        }
    };
    Ok(Start { k, r0, dz0 })
}

/// Accepted integration steps with dense-output data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolutionTrace {
    pub r0: f64,
    pub radius: f64,
    /// Frobenius exponent `k` with `y = r^k Z`.
    pub exponent: f64,
    pub tol: f64,
    pub grid: Vec<f64>,
    pub y: Vec<f64>,
    pub dy: Vec<f64>,
    /// Scaled local error estimate of the step ending at each node (0 at `r0`).
    pub local_error: Vec<f64>,
    t: Vec<f64>,
    z: Vec<f64>,
    dz: Vec<f64>,
    ddz: Vec<f64>,
    settings_hash: String,
}

fn hermite(t0: f64, t1: f64, f0: [f64; 3], f1: [f64; 3], t: f64) -> (f64, f64) {
    let h = t1 - t0;
    let s = (t - t0) / h;
    let (s2, s3, s4, s5) = (s * s, s * s * s, s.powi(4), s.powi(5));
    let h0 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5;
    let h1 = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5;
    let h2 = 0.5 * (s2 - 3.0 * s3 + 3.0 * s4 - s5);
    let h3 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5;
    let h4 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5;
    let h5 = 0.5 * (s3 - 2.0 * s4 + s5);
    let v = f0[0] * h0 + h * f0[1] * h1 + h * h * f0[2] * h2 + f1[0] * h3 + h * f1[1] * h4 + h * h * f1[2] * h5;
    let d0 = -30.0 * s2 + 60.0 * s3 - 30.0 * s4;
    let d1 = 1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4;
    let d2 = 0.5 * (2.0 * s - 9.0 * s2 + 12.0 * s3 - 5.0 * s4);
    let d3 = 30.0 * s2 - 60.0 * s3 + 30.0 * s4;
    let d4 = -12.0 * s2 + 28.0 * s3 - 15.0 * s4;
    let d5 = 0.5 * (3.0 * s2 - 8.0 * s3 + 5.0 * s4);
    let dv = (f0[0] * d0 + h * f0[1] * d1 + h * h * f0[2] * d2 + f1[0] * d3 + h * f1[1] * d4 + h * h * f1[2] * d5) / h;
    (v, dv)
}

impl SolutionTrace {
    fn node(&self, i: usize) -> [f64; 3] {
        [self.z[i], self.dz[i], self.ddz[i]]
    }

    fn z_at(&self, step: usize, t: f64) -> (f64, f64) {
        hermite(self.t[step], self.t[step + 1], self.node(step), self.node(step + 1), t)
    }

    fn to_y(&self, t: f64, z: f64, dz: f64) -> (f64, f64) {
        let r = self.r_of(t);
        let rk = r.powf(self.exponent);
        (rk * z, rk / r * (self.exponent * z + dz))
    }

    fn r_of(&self, t: f64) -> f64 {
        self.radius * t.exp()
    }

    /// `(y, y')` at any `r` in `[r0, R_end]` via quintic Hermite interpolation.
    pub fn eval(&self, r: f64) -> Option<(f64, f64)> {
        let t = (r / self.radius).ln();
        let last = self.t.len() - 1;
        if !(t >= self.t[0] && t <= self.t[last]) {
            return None;
        }
        let step = match self.t.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(i) => return Some((self.y[i], self.dy[i])),
            Err(i) => i - 1,
        };
        let (z, dz) = self.z_at(step, t);
        Some(self.to_y(t, z, dz))
    }

    pub fn settings_hash(&self) -> &str {
        &self.settings_hash
    }

    /// Smallest value of `y` over the nodes and interior probes.
    pub fn min_y(&self) -> f64 {
        let mut m = f64::INFINITY;
        for i in 0..self.t.len() {
            m = m.min(self.z[i]);
            if i + 1 < self.t.len() {
                for j in 1..=PROBES {
                    let t = self.t[i] + (self.t[i + 1] - self.t[i]) * j as f64 / (PROBES + 1) as f64;
                    m = m.min(self.z_at(i, t).0);
                }
            }
        }
        m
    }

    /// CSV with columns `r,y,dy`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("r,y,dy\n");
        for i in 0..self.grid.len() {
            s.push_str(&format!("{:e},{:e},{:e}\n", self.grid[i], self.y[i], self.dy[i]));
        }
        s
    }

    /// Sign change inside step `i`, as a `t` bracket.
    fn sign_change_in(&self, i: usize) -> Option<(f64, f64)> {
        let mut prev_t = self.t[i];
        let mut prev = self.z[i];
        for j in 1..=PROBES + 1 {
            let t = if j == PROBES + 1 {
                self.t[i + 1]
            } else {
                self.t[i] + (self.t[i + 1] - self.t[i]) * j as f64 / (PROBES + 1) as f64
            };
            let v = if j == PROBES + 1 { self.z[i + 1] } else { self.z_at(i, t).0 };
            if (prev > 0.0) != (v > 0.0) {
                return Some((prev_t, t));
            }
            prev_t = t;
            prev = v;
        }
        None
    }

    fn refine_zero(&self, i: usize, mut lo: f64, mut hi: f64) -> f64 {
        let positive_lo = self.z_at(i, lo).0 > 0.0;
        for _ in 0..200 {
            if self.r_of(hi) - self.r_of(lo) <= 1e-10 * self.r_of(lo) {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if (self.z_at(i, mid).0 > 0.0) == positive_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        self.r_of(0.5 * (lo + hi))
    }
}

/// Smallest sign change of `y` along the trace, refined to 1e-10 relative.
pub fn first_zero(trace: &SolutionTrace) -> Option<f64> {
    (0..trace.t.len().saturating_sub(1)).find_map(|i| {
        trace.sign_change_in(i).map(|(lo, hi)| trace.refine_zero(i, lo, hi))
    })
}

fn settings_hash(tol: f64, start: &Start) -> String {
    let text = format!(
        "dopri5(4);tol={tol:e};hmax={MAX_STEP:e};safety={SAFETY:e};probes={PROBES};r0={:e};k={:e};dz0={:e}",
        start.r0, start.k, start.dz0
    );
    hex::encode(Sha256::digest(text.as_bytes()))
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

struct System<'a> {
    c: &'a RadialCoefficients,
    k: f64,
}

impl System<'_> {
    /// Returns `(Z', Z'')` at log-radius `t` (relative to `ln R`).
    fn rhs(&self, t: f64, z: f64, dz: f64) -> (f64, f64) {
        let r = self.c.radius * t.exp();
        let a = self.c.big_a(r);
        let b = self.c.big_b(r);
        let k = self.k;
        (dz, (a - 2.0 * k) * dz + (a * k - k * k - b) * z)
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if (1e-12..=1e-4).contains(&tol) {
        Ok(())
    } else {
        Err(Error::invalid(format!("tolerance must lie in [1e-12, 1e-4], got {tol:e}")))
    }
}

fn run(c: &RadialCoefficients, tol: f64, stop_at_zero: bool) -> Result<SolutionTrace> {
    check_tol(tol)?;
    let start = frobenius_start(c)?;
    let sys = System { c, k: start.k };
    let t_end = 0.0;
    let mut t = (start.r0 / c.radius).ln();
    let mut z = 1.0;
    let mut dz = start.dz0;
    let (_, ddz0) = sys.rhs(t, z, dz);
    if !ddz0.is_finite() || !dz.is_finite() {
        return Err(Error::numerical(format!("coefficients are not finite at r0 = {:e}", start.r0)));
    }
    let mut tr = SolutionTrace {
        r0: start.r0,
        radius: c.radius,
        exponent: start.k,
        tol,
        grid: vec![],
        y: vec![],
        dy: vec![],
        local_error: vec![0.0],
        t: vec![t],
        z: vec![z],
        dz: vec![dz],
        ddz: vec![ddz0],
        settings_hash: settings_hash(tol, &start),
    };
    let mut h = (0.01f64).min((t_end - t) / 10.0);
    let mut k = [[0.0f64; 2]; 7];
    k[0] = [dz, ddz0];
    let mut steps = 0usize;
    while t < t_end {
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Error::numerical("step budget exhausted"));
        }
        if t + h > t_end {
            h = t_end - t;
        }
        let mut zn = z;
        let mut dzn = dz;
        for s in 1..7 {
            let mut yz = z;
            let mut yd = dz;
            for (j, kj) in k.iter().enumerate().take(s) {
                yz += h * A[s][j] * kj[0];
                yd += h * A[s][j] * kj[1];
            }
            let (f0, f1) = sys.rhs(t + C[s] * h, yz, yd);
            k[s] = [f0, f1];
            // The last stage is evaluated at the fifth-order solution (FSAL).
            if s == 6 {
                zn = yz;
                dzn = yd;
            }
        }
        let mut e = [0.0f64; 2];
        for (s, ks) in k.iter().enumerate() {
            e[0] += h * E[s] * ks[0];
            e[1] += h * E[s] * ks[1];
        }
        let sc0 = tol * (1.0 + z.abs().max(zn.abs()));
        let sc1 = tol * (1.0 + dz.abs().max(dzn.abs()));
        let err = (e[0].abs() / sc0).max(e[1].abs() / sc1);
        let finite = zn.is_finite() && dzn.is_finite() && err.is_finite();
        if finite && err <= 1.0 {
            t += h;
            z = zn;
            dz = dzn;
            k[0] = k[6];
            if z.abs() > 1e250 {
                return Err(Error::numerical("solution overflow"));
            }
            tr.t.push(t);
            tr.z.push(z);
            tr.dz.push(dz);
            tr.ddz.push(k[6][1]);
            tr.local_error.push(err * tol);
            let fac = if err == 0.0 { 5.0 } else { (SAFETY * err.powf(-0.2)).clamp(0.2, 5.0) };
            h = (h * fac).min(MAX_STEP);
            if stop_at_zero && tr.sign_change_in(tr.t.len() - 2).is_some() {
                break;
            }
        } else {
            let fac = if finite { (SAFETY * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.1 };
            h *= fac;
            if h < 1e-13 * t.abs().max(1.0) {
                return Err(Error::numerical(format!(
                    "step size underflow at r = {:e}",
                    c.radius * t.exp()
                )));
            }
        }
    }
    let n = tr.t.len();
    tr.grid = Vec::with_capacity(n);
    for i in 0..n {
        let (yv, dyv) = tr.to_y(tr.t[i], tr.z[i], tr.dz[i]);
        tr.grid.push(if i == 0 { tr.r0 } else { tr.r_of(tr.t[i]) });
        tr.y.push(yv);
        tr.dy.push(dyv);
    }
    Ok(tr)
}

/// Integrates from the Frobenius start `r0` to `R` with local error `tol`.
pub fn integrate_singular_ode(coeffs: &RadialCoefficients, tol: f64) -> Result<SolutionTrace> {
    run(coeffs, tol, false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Positive,
    FirstZero,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositivityCertificate {
    pub status: Status,
    /// Location of the first zero when `status` is `first_zero` (or when an
    /// inconclusive verdict was caused by a zero next to `R`).
    pub zero: Option<f64>,
    pub radius: f64,
    pub tolerance: f64,
    pub settings_hash: String,
    pub r0: f64,
    pub exponent: f64,
    pub min_y: Option<f64>,
    pub reason: Option<String>,
}

impl PositivityCertificate {
    pub fn is_positive(&self) -> bool {
        self.status == Status::Positive
    }
}

/// Half-width of the band next to `R` where a zero yields `inconclusive`.
pub fn boundary_zone(radius: f64, tol: f64) -> f64 {
    1e-9 * radius + 100.0 * tol
}

/// Decides whether the principal solution stays positive on `(0, R)`.
///
/// Invalid input is an error; integration failures give `inconclusive`.
pub fn certify_positive(coeffs: &RadialCoefficients, tol: f64) -> Result<PositivityCertificate> {
    check_tol(tol)?;
    let start = frobenius_start(coeffs)?;
    let base = PositivityCertificate {
        status: Status::Inconclusive,
        zero: None,
        radius: coeffs.radius,
        tolerance: tol,
        settings_hash: settings_hash(tol, &start),
        r0: start.r0,
        exponent: start.k,
        min_y: None,
        reason: None,
    };
    let trace = match run(coeffs, tol, true) {
        Ok(tr) => tr,
        Err(Error::Numerical(msg)) => return Ok(PositivityCertificate { reason: Some(msg), ..base }),
        Err(e) => return Err(e),
    };
    match first_zero(&trace) {
        Some(r) if coeffs.radius - r <= boundary_zone(coeffs.radius, tol) => Ok(PositivityCertificate {
            zero: Some(r),
            reason: Some("zero within the tolerance band at R".into()),
            ..base
        }),
        Some(r) => Ok(PositivityCertificate { status: Status::FirstZero, zero: Some(r), ..base }),
        None => {
            let m = trace.min_y();
            let (y_end, dy_end) = (*trace.y.last().unwrap(), *trace.dy.last().unwrap());
            if dy_end < 0.0 && y_end <= -dy_end * boundary_zone(coeffs.radius, tol) {
                Ok(PositivityCertificate {
                    min_y: Some(m),
                    reason: Some("solution vanishes within the tolerance band at R".into()),
                    ..base
                })
            } else if m > 0.0 {
                Ok(PositivityCertificate { status: Status::Positive, min_y: Some(m), ..base })
            } else {
                Ok(PositivityCertificate {
                    min_y: Some(m),
                    reason: Some("solution touches zero without a sign change".into()),
                    ..base
                })
            }
        }
    }
}

#[cfg(test)]
mod tests;
