use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// C² cubic spline with prescribed end slopes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubicSpline {
    knots: Vec<f64>,
    values: Vec<f64>,
    moments: Vec<f64>,
}

impl CubicSpline {
    pub fn clamped(knots: Vec<f64>, values: Vec<f64>, slope_start: f64, slope_end: f64) -> Result<Self> {
        let m = knots.len();
        if m < 2 || values.len() != m {
            return Err(Error::invalid("spline needs at least two knots and one value per knot"));
        }
        if !knots.windows(2).all(|w| w[0] < w[1]) || knots.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::invalid("spline knots must be finite and strictly increasing"));
        }
        let h: Vec<f64> = knots.windows(2).map(|w| w[1] - w[0]).collect();
        let slope = |i: usize| (values[i + 1] - values[i]) / h[i];
        let mut sub = vec![0.0; m];
        let mut diag = vec![0.0; m];
        let mut sup = vec![0.0; m];
        let mut rhs = vec![0.0; m];
        diag[0] = 2.0 * h[0];
        sup[0] = h[0];
        rhs[0] = 6.0 * (slope(0) - slope_start);
        for i in 1..m - 1 {
            sub[i] = h[i - 1];
            diag[i] = 2.0 * (h[i - 1] + h[i]);
            sup[i] = h[i];
            rhs[i] = 6.0 * (slope(i) - slope(i - 1));
        }
        sub[m - 1] = h[m - 2];
        diag[m - 1] = 2.0 * h[m - 2];
        rhs[m - 1] = 6.0 * (slope_end - slope(m - 2));
        // Thomas algorithm; the system is strictly diagonally dominant.
        for i in 1..m {
            let w = sub[i] / diag[i - 1];
            diag[i] -= w * sup[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        let mut moments = vec![0.0; m];
        moments[m - 1] = rhs[m - 1] / diag[m - 1];
        for i in (0..m - 1).rev() {
            moments[i] = (rhs[i] - sup[i] * moments[i + 1]) / diag[i];
        }
        Ok(CubicSpline { knots, values, moments })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `(s, s', s'')`; zero outside the knot range.
    pub fn eval(&self, x: f64) -> (f64, f64, f64) {
        let last = self.knots.len() - 1;
        if x < self.knots[0] || x > self.knots[last] {
            return (0.0, 0.0, 0.0);
        }
        let i = match self.knots.binary_search_by(|k| k.partial_cmp(&x).unwrap()) {
            Ok(i) => i.min(last - 1),
            Err(i) => i - 1,
        };
        let h = self.knots[i + 1] - self.knots[i];
        let a = (self.knots[i + 1] - x) / h;
        let b = (x - self.knots[i]) / h;
        let (mi, mj) = (self.moments[i], self.moments[i + 1]);
        let (yi, yj) = (self.values[i], self.values[i + 1]);
        let v = a * yi + b * yj + ((a * a * a - a) * mi + (b * b * b - b) * mj) * h * h / 6.0;
        let d = (yj - yi) / h + (-(3.0 * a * a - 1.0) * mi + (3.0 * b * b - 1.0) * mj) * h / 6.0;
        (v, d, a * mi + b * mj)
    }

    pub fn scaled(&self, c: f64) -> Self {
        CubicSpline {
            knots: self.knots.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
            moments: self.moments.iter().map(|v| c * v).collect(),
        }
    }
}
