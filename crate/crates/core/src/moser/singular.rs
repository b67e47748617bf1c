use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::sphere_area;
use crate::verifier::{radial_integral, RadialTestFunction};

/// `(1 - α/n) n ω^{1/(n-1)}` with `ω = |S^{n-1}|`.
pub fn singular_moser_threshold(n: u32, alpha: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::invalid("the singular Moser threshold needs n >= 2"));
    }
    let nf = n as f64;
    if !(0.0..nf).contains(&alpha) {
        return Err(Error::invalid(format!("need 0 <= alpha < n (got alpha = {alpha}, n = {n})")));
    }
    if n == 2 && alpha == 0.0 {
        return Ok(4.0 * std::f64::consts::PI);
    }
    Ok((1.0 - alpha / nf) * nf * sphere_area(n).powf(1.0 / (nf - 1.0)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularMoserOutcome {
    /// `∫_B exp(β|u|^{n/(n-1)}) |x|^{-α} dx` after normalisation.
    pub integral: f64,
    pub error: f64,
    pub beta_max: f64,
    pub admissible: bool,
    /// `∫|∇u|ⁿ` before normalisation.
    pub gradient_norm: f64,
    /// Factor applied to `u` so that `∫|∇u|ⁿ <= 1`.
    pub scale: f64,
    pub pass: bool,
    pub note: Option<String>,
}

/// Evaluates the singular exponential integral for a radial `u` on the unit
/// ball; passes when the integral is finite.
pub fn singular_moser_check(n: u32, alpha: f64, beta: f64, u: &RadialTestFunction) -> Result<SingularMoserOutcome> {
    let beta_max = singular_moser_threshold(n, alpha)?;
    if !(beta >= 0.0) {
        return Err(Error::invalid("beta must be non-negative"));
    }
    if u.support > 1.0 + 1e-12 {
        return Err(Error::invalid("test function must live in the unit ball"));
    }
    let nf = n as f64;
    let b = u.breakpoints();
    let gradient_norm = radial_integral(|r| u.eval(r).1.abs().powf(nf), n, &b)?.value;
    let scale = if gradient_norm > 1.0 { gradient_norm.powf(-1.0 / nf) } else { 1.0 };
    let q = nf / (nf - 1.0);
    let res = radial_integral(|r| (beta * (scale * u.eval(r).0).abs().powf(q)).exp() * r.powf(-alpha), n, &b);
    let (integral, error, pass, note) = match res {
        Ok(i) if i.value.is_finite() => (i.value, i.error, true, None),
        Ok(_) => (f64::INFINITY, f64::INFINITY, false, Some("integral overflowed".to_string())),
        Err(e) => (f64::INFINITY, f64::INFINITY, false, Some(e.to_string())),
    };
    Ok(SingularMoserOutcome {
        integral,
        error,
        beta_max,
        admissible: beta <= beta_max,
        gradient_norm,
        scale,
        pass,
        note,
    })
}
