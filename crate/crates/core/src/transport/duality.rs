use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{golden_min, integrate_adaptive, sphere_area};
use crate::weight_dsl::parse_weight;

/// Half-width of the `s = ln r` window; beyond it the integrands are
/// extended by their exponential tails.
const WINDOW: f64 = 40.0;

/// `|S^{n-1}| ∫_0^∞ g(r) r^{n-1} dr` with analytic exponential tails in `ln r`.
fn radial_moment(n: u32, g: impl Fn(f64) -> f64) -> Result<f64> {
    let nf = n as f64;
    let h = |s: f64| {
        let r = s.exp();
        g(r) * r.powf(nf)
    };
    let core = integrate_adaptive(&h, -WINDOW, WINDOW, 1e-300, 1e-13);
    if !core.value.is_finite() || !core.converged {
        return Err(Error::numerical("radial quadrature did not converge"));
    }
    let tail = |s: f64, dir: f64| -> Result<f64> {
        let (a, b) = (h(s), h(s + dir));
        if a == 0.0 {
            return Ok(0.0);
        }
        let rate = (a / b).ln();
        if !(rate > 0.0) {
            return Err(Error::numerical(format!("integrand does not decay at ln r = {s}")));
        }
        Ok(a / rate)
    };
    Ok(sphere_area(n) * (core.value + tail(WINDOW, 1.0)? + tail(-WINDOW, -1.0)?))
}

fn check_dim(n: u32) -> Result<()> {
    if n < 3 {
        return Err(Error::invalid(format!("the Sobolev duality needs n >= 3 (got {n})")));
    }
    Ok(())
}

/// `n(n-2)/(n-1) ∫ρ^{(n-1)/n} - ∫|x|²ρ` at `ρ_t ∝ t^n (1+|tx|²)^{-n}`.
pub fn sobolev_sup_side(n: u32, t: f64) -> Result<f64> {
    check_dim(n)?;
    if !(t > 0.0) {
        return Err(Error::invalid("profile scale t must be positive"));
    }
    let nf = n as f64;
    let base = |r: f64| (1.0 + r * r).powf(-nf);
    let mass = radial_moment(n, base)?;
    let c = 1.0 / mass;
    // ρ_t(x) = c t^n base(t|x|); substitute y = t x.
    let power = radial_moment(n, |r| (c * base(r)).powf((nf - 1.0) / nf))? / t;
    let second = radial_moment(n, |r| r * r * c * base(r))? / (t * t);
    Ok(nf * (nf - 2.0) / (nf - 1.0) * power - second)
}

/// `∫|∇f|² / (∫|f|^{2*})^{2/2*}` at `f_t = (1+|tx|²)^{-(n-2)/2}`.
pub fn sobolev_inf_side(n: u32, t: f64) -> Result<f64> {
    check_dim(n)?;
    if !(t > 0.0) {
        return Err(Error::invalid("profile scale t must be positive"));
    }
    let nf = n as f64;
    let crit = 2.0 * nf / (nf - 2.0);
    let grad = radial_moment(n, |r| {
        let d = (nf - 2.0) * t * t * r * (1.0 + t * t * r * r).powf(-nf / 2.0);
        d * d
    })?;
    let norm = radial_moment(n, |r| (1.0 + t * t * r * r).powf(-(nf - 2.0) / 2.0 * crit))?;
    Ok(grad / norm.powf(2.0 / crit))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DualityGap {
    pub n: u32,
    pub sup_side: f64,
    pub inf_side: f64,
    pub gap: f64,
    pub t_sup: f64,
    pub t_inf: f64,
    /// `(t, sup side, inf side)` at the sampled scales.
    pub samples: Vec<(f64, f64, f64)>,
}

/// Optimises both sides over `t ∈ [t_lo, t_hi]` (golden section in `ln t`).
pub fn sobolev_duality_gap(n: u32, t_lo: f64, t_hi: f64) -> Result<DualityGap> {
    check_dim(n)?;
    if !(0.0 < t_lo && t_lo < t_hi) {
        return Err(Error::invalid("need 0 < t_lo < t_hi"));
    }
    let (a, b) = (t_lo.ln(), t_hi.ln());
    let samples: Vec<(f64, f64, f64)> = (0..9)
        .map(|i| {
            let t = (a + (b - a) * i as f64 / 8.0).exp();
            Ok((t, sobolev_sup_side(n, t)?, sobolev_inf_side(n, t)?))
        })
        .collect::<Result<_>>()?;
    let neg_sup = |s: f64| -sobolev_sup_side(n, s.exp()).unwrap_or(f64::NEG_INFINITY);
    let (s_sup, v_sup) = golden_min(neg_sup, a, b, 1e-10);
    let inf = |s: f64| sobolev_inf_side(n, s.exp()).unwrap_or(f64::INFINITY);
    let (s_inf, v_inf) = golden_min(inf, a, b, 1e-10);
    let (sup_side, inf_side) = (-v_sup, v_inf);
    if !sup_side.is_finite() || !inf_side.is_finite() {
        return Err(Error::numerical("duality sides are not finite"));
    }
    Ok(DualityGap {
        n,
        sup_side,
        inf_side,
        gap: inf_side - sup_side,
        t_sup: s_sup.exp(),
        t_inf: s_inf.exp(),
        samples,
    })
}

/// Checks `-Δf = κ f^{(n+2)/(n-2)}` for `f = (1+r²)^{-(n-2)/2}` with symbolic
/// derivatives; returns `κ` and the largest relative deviation of the ratio.
pub fn yamabe_check(n: u32) -> Result<(f64, f64)> {
    check_dim(n)?;
    let nf = n as f64;
    let f = parse_weight(&format!("pow(1 + pow(r,2), {})", -(nf - 2.0) / 2.0))?;
    let d1 = f.differentiate(1)?;
    let d2 = f.differentiate(2)?;
    let ratios: Vec<f64> = (1..=200)
        .map(|i| {
            let r = 0.05 * i as f64;
            let lap = d2.eval(r) + (nf - 1.0) * d1.eval(r) / r;
            -lap / f.eval(r).powf((nf + 2.0) / (nf - 2.0))
        })
        .collect();
    let kappa = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let dev = ratios.iter().map(|q| (q / kappa - 1.0).abs()).fold(0.0, f64::max);
    Ok((kappa, dev))
}
