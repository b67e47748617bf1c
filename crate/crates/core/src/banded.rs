//! Symmetric banded matrices with an unpivoted LDLᵀ factorisation.
//!
//! The factorisation doubles as a Sturm count: by Sylvester's law of inertia
//! the number of negative pivots of `K - σM` equals the number of
//! generalized eigenvalues below `σ`.

#[derive(Debug, Clone)]
pub struct SymBanded {
    n: usize,
    bw: usize,
    // Row-major lower band: entry (i, i-k) lives at i*(bw+1)+k.
    data: Vec<f64>,
}

impl SymBanded {
    pub fn zeros(n: usize, bw: usize) -> Self {
        SymBanded { n, bw, data: vec![0.0; n * (bw + 1)] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        debug_assert!(i - j <= self.bw);
        i * (self.bw + 1) + (i - j)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i.abs_diff(j) > self.bw {
            0.0
        } else {
            self.data[self.idx(i, j)]
        }
    }

    /// Adds `v` to the symmetric pair `(i, j)`, `(j, i)`.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    /// `self - sigma * other` (same shape).
    pub fn shifted(&self, sigma: f64, other: &SymBanded) -> SymBanded {
        assert_eq!((self.n, self.bw), (other.n, other.bw));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - sigma * b).collect();
        SymBanded { n: self.n, bw: self.bw, data }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let lo = i.saturating_sub(self.bw);
            for j in lo..=i {
                let a = self.data[i * (self.bw + 1) + (i - j)];
                y[i] += a * x[j];
                if j != i {
                    y[j] += a * x[i];
                }
            }
        }
        y
    }

    pub fn quad_form(&self, x: &[f64]) -> f64 {
        self.mul_vec(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// Unpivoted LDLᵀ; `None` when a pivot is exactly zero or not finite.
    pub fn ldlt(&self) -> Option<Ldlt> {
        let (n, bw) = (self.n, self.bw);
        let w = bw + 1;
        let mut l = vec![0.0; n * w];
        let mut d = vec![0.0; n];
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            for j in lo..i {
                let mut s = self.data[i * w + (i - j)];
                let klo = lo.max(j.saturating_sub(bw));
                for k in klo..j {
                    s -= l[i * w + (i - k)] * d[k] * l[j * w + (j - k)];
                }
                l[i * w + (i - j)] = s / d[j];
            }
            let mut s = self.data[i * w];
            for k in lo..i {
                let lik = l[i * w + (i - k)];
                s -= lik * lik * d[k];
            }
            if s == 0.0 || !s.is_finite() {
                return None;
            }
            d[i] = s;
            l[i * w] = 1.0;
        }
        Some(Ldlt { n, bw, l, d })
    }
}

#[derive(Debug, Clone)]
pub struct Ldlt {
    n: usize,
    bw: usize,
    l: Vec<f64>,
    d: Vec<f64>,
}

impl Ldlt {
    pub fn negative_pivots(&self) -> usize {
        self.d.iter().filter(|&&x| x < 0.0).count()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let w = self.bw + 1;
        let mut x = b.to_vec();
        for i in 0..self.n {
            let lo = i.saturating_sub(self.bw);
            for k in lo..i {
                x[i] -= self.l[i * w + (i - k)] * x[k];
            }
        }
        for i in 0..self.n {
            x[i] /= self.d[i];
        }
        for i in (0..self.n).rev() {
            let hi = (i + self.bw).min(self.n - 1);
            for k in i + 1..=hi {
                x[i] -= self.l[k * w + (k - i)] * x[k];
            }
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tridiag(n: usize) -> SymBanded {
        let mut a = SymBanded::zeros(n, 1);
        for i in 0..n {
            a.add(i, i, 2.0);
            if i > 0 {
                a.add(i, i - 1, -1.0);
            }
        }
        a
    }

    #[test]
    fn solve_round_trip() {
        let mut a = SymBanded::zeros(6, 2);
        for i in 0..6 {
            a.add(i, i, 6.0 + i as f64);
            if i >= 1 {
                a.add(i, i - 1, 1.5);
            }
            if i >= 2 {
                a.add(i, i - 2, -0.7);
            }
        }
        let x: Vec<f64> = (0..6).map(|i| (i as f64).sin() + 0.3).collect();
        let b = a.mul_vec(&x);
        let y = a.ldlt().unwrap().solve(&b);
        for (u, v) in x.iter().zip(&y) {
            assert!((u - v).abs() < 1e-13);
        }
    }

    #[test]
    fn sturm_count_matches_known_spectrum() {
        // eigenvalues of the second-difference matrix: 2 - 2cos(kπ/(n+1))
        let n = 20;
        let a = tridiag(n);
        let mut id = SymBanded::zeros(n, 1);
        for i in 0..n {
            id.add(i, i, 1.0);
        }
        for k in 1..=n {
            let lam = 2.0 - 2.0 * (k as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos();
            let below = a.shifted(lam - 1e-9, &id).ldlt().unwrap().negative_pivots();
            let above = a.shifted(lam + 1e-9, &id).ldlt().unwrap().negative_pivots();
            assert_eq!((below, above), (k - 1, k));
        }
    }
}
