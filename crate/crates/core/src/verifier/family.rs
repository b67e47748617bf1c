use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::RadialTestFunction;
use crate::error::Result;
use crate::radial_ode::{integrate_singular_ode, RadialCoefficients, DEFAULT_TOL};
use crate::weight_dsl::{parse_weight, WeightExpr};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyMember {
    pub label: String,
    pub function: RadialTestFunction,
}

/// Fifty smooth radial profiles on `[0, R]` with `u'(0) = u(R) = u'(R) = 0`:
/// ten polynomial bumps, ten cut-off radial eigenprofiles and thirty random
/// clamped splines. Deterministic in `seed`.
pub fn profile_family(seed: u64, radius: f64, n: u32) -> Result<Vec<FamilyMember>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(50);

    for i in 0..10 {
        let k = 2 + i % 3;
        let c: f64 = rng.gen_range(-0.5..2.0);
        let x2 = format!("pow(r/{radius:e},2)");
        let text = format!("pow(1 - {x2},{k}) * (1 + {c:e} * {x2})");
        out.push(FamilyMember {
            label: format!("bump{i}"),
            function: RadialTestFunction::symbolic(parse_weight(&text)?, radius)?,
        });
    }

    let knots: Vec<f64> = (0..=48).map(|i| radius * i as f64 / 48.0).collect();
    for i in 0..10 {
        // Principal solution of -Δy = λ y on a ball large enough to keep y > 0,
        // multiplied by a smooth cutoff.
        let lambda: f64 = rng.gen_range(0.2..1.0) * (2.0 / radius).powi(2);
        let coeffs = RadialCoefficients::radial_laplacian(n, WeightExpr::constant(lambda), radius)?;
        let trace = integrate_singular_ode(&coeffs, DEFAULT_TOL)?;
        let p = 2 + i % 2;
        let values: Vec<f64> = knots
            .iter()
            .map(|&r| {
                let y = trace.eval(r.max(trace.r0)).map(|v| v.0).unwrap_or(0.0);
                y * (1.0 - (r / radius).powi(2)).powi(p)
            })
            .collect();
        let mut values = values;
        *values.last_mut().unwrap() = 0.0;
        out.push(FamilyMember {
            label: format!("eigencut{i}"),
            function: RadialTestFunction::spline(knots.clone(), values, 0.0)?,
        });
    }

    for i in 0..30 {
        let m = rng.gen_range(6..=16usize);
        let ks: Vec<f64> = (0..=m).map(|j| radius * j as f64 / m as f64).collect();
        let mut vs: Vec<f64> = (0..=m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        vs[m] = 0.0;
        out.push(FamilyMember {
            label: format!("spline{i}"),
            function: RadialTestFunction::spline(ks, vs, 0.0)?,
        });
    }
    Ok(out)
}
