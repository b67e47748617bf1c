use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Function sampled on increasing abscissae.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn new(xs: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if xs.is_empty() {
            return Err(Error::invalid("empty grid"));
        }
        if xs.len() != values.len() {
            return Err(Error::invalid("grid and values differ in length"));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("grid must be strictly increasing"));
        }
        if values.iter().chain(&xs).any(|v| !v.is_finite()) {
            return Err(Error::invalid("grid function must be finite"));
        }
        Ok(GridFunction { xs, values })
    }

    pub fn sample(lo: f64, hi: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let xs: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
        let values = xs.iter().map(|&x| f(x)).collect();
        Self::new(xs, values)
    }

    /// Largest absolute slope between neighbouring samples.
    pub fn lipschitz(&self) -> f64 {
        self.xs
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, v)| ((v[1] - v[0]) / (x[1] - x[0])).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_spacing(&self) -> f64 {
        self.xs.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }
}

/// Lower convex hull as indices into the samples.
fn lower_hull(f: &GridFunction) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::new();
    for i in 0..f.xs.len() {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (f.xs[b] - f.xs[a]) * (f.values[i] - f.values[a]) - (f.values[b] - f.values[a]) * (f.xs[i] - f.xs[a]);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    hull
}

/// `f*(y) = max_x (x y - f(x))` at each `y` in `ys`.
pub fn legendre_on(f: &GridFunction, ys: &[f64]) -> Result<GridFunction> {
    if f.xs.is_empty() {
        return Err(Error::invalid("empty grid"));
    }
    let hull = lower_hull(f);
    let slopes: Vec<f64> = hull
        .windows(2)
        .map(|w| (f.values[w[1]] - f.values[w[0]]) / (f.xs[w[1]] - f.xs[w[0]]))
        .collect();
    let mut order: Vec<usize> = (0..ys.len()).collect();
    order.sort_by(|&a, &b| ys[a].total_cmp(&ys[b]));
    let mut out = vec![0.0; ys.len()];
    // Slopes increase along the hull, so one forward scan serves sorted ys.
    let mut k = 0;
    for &j in &order {
        let y = ys[j];
        while k < slopes.len() && slopes[k] < y {
            k += 1;
        }
        let i = hull[k];
        out[j] = f.xs[i] * y - f.values[i];
    }
    GridFunction::new(ys.to_vec(), out)
}

/// Legendre transform on a grid spanning the hull's slope range with the same
/// number of points as `f`.
pub fn legendre(f: &GridFunction) -> Result<GridFunction> {
    if f.xs.is_empty() {
        return Err(Error::invalid("empty grid"));
    }
    if f.xs.len() == 1 {
        return legendre_on(f, &[-1.0, 0.0, 1.0]);
    }
    let hull = lower_hull(f);
    let slope = |a: usize, b: usize| (f.values[b] - f.values[a]) / (f.xs[b] - f.xs[a]);
    let lo = slope(hull[0], hull[1]);
    let hi = slope(hull[hull.len() - 2], hull[hull.len() - 1]);
    let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 1.0, lo + 1.0) };
    let n = f.xs.len();
    let ys: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    legendre_on(f, &ys)
}
