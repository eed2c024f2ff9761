use std::f64::consts::PI;

/// Piecewise Chebyshev interpolant of a smooth function.
#[derive(Debug, Clone)]
pub struct Chebyshev {
    breaks: Vec<f64>,
    coeffs: Vec<Vec<f64>>,
}

impl Chebyshev {
    /// Interpolates `f` at first-kind Chebyshev nodes of the given degree on
    /// each interval between consecutive `breaks`.
    pub fn build<F: FnMut(f64) -> f64>(mut f: F, breaks: &[f64], degree: usize) -> Self {
        assert!(breaks.len() >= 2, "need at least one interval");
        let n = degree + 1;
        let mut coeffs = Vec::with_capacity(breaks.len() - 1);
        for w in breaks.windows(2) {
            let (a, b) = (w[0], w[1]);
            let vals: Vec<f64> = (0..n)
                .map(|k| {
                    let t = (PI * (k as f64 + 0.5) / n as f64).cos();
                    f(0.5 * (a + b) + 0.5 * (b - a) * t)
                })
                .collect();
            let c: Vec<f64> = (0..n)
                .map(|j| {
                    let s: f64 = vals
                        .iter()
                        .enumerate()
                        .map(|(k, v)| v * (PI * j as f64 * (k as f64 + 0.5) / n as f64).cos())
                        .sum();
                    let scale = if j == 0 { 1.0 } else { 2.0 };
                    scale * s / n as f64
                })
                .collect();
            coeffs.push(c);
        }
        Chebyshev {
            breaks: breaks.to_vec(),
            coeffs,
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.breaks[0], *self.breaks.last().unwrap())
    }

    /// Evaluates the interpolant; arguments outside the domain are clamped.
    pub fn eval(&self, x: f64) -> f64 {
        let (lo, hi) = self.domain();
        let x = x.clamp(lo, hi);
        let i = match self.breaks.binary_search_by(|b| b.total_cmp(&x)) {
            Ok(i) => i.min(self.coeffs.len() - 1),
            Err(i) => (i.max(1) - 1).min(self.coeffs.len() - 1),
        };
        let (a, b) = (self.breaks[i], self.breaks[i + 1]);
        let t = (2.0 * x - a - b) / (b - a);
        let c = &self.coeffs[i];
        let (mut b1, mut b2) = (0.0, 0.0);
        for &cj in c.iter().skip(1).rev() {
            let b0 = 2.0 * t * b1 - b2 + cj;
            b2 = b1;
            b1 = b0;
        }
        t * b1 - b2 + c[0]
    }

    /// Largest magnitude of the two trailing coefficients over all pieces,
    /// a cheap proxy for the truncation error.
    pub fn tail_magnitude(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|c| {
                let n = c.len();
                c[n - 1].abs().max(if n > 1 { c[n - 2].abs() } else { 0.0 })
            })
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_smooth_function() {
        let c = Chebyshev::build(|x: f64| x.exp().sin(), &[0.0, 1.0, 1.5, 2.0, 2.5], 24);
        for i in 0..=100 {
            let x = 2.5 * i as f64 / 100.0;
            assert!((c.eval(x) - x.exp().sin()).abs() < 1e-12, "x = {x}");
        }
        assert!(c.tail_magnitude() < 1e-12);
    }
}
