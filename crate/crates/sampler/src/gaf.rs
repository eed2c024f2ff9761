use psdpp_hypgeom::{Point, C64};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::roots::{aberth_roots, horner, horner_derivative, polish};
use crate::{stream, window_rho, Configuration, Generator, Result, SamplerError, TruncationMeta};

const CIRCLE_NODES: usize = 1024;
const SIGMAS: f64 = 6.0;
const SHIFT_TOL: f64 = 1e-10;
const DOUBLE_ROOT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct GafSpec {
    /// Hyperbolic window radius `R`.
    pub window_radius: f64,
    pub tail_epsilon: f64,
    pub max_degree: usize,
    /// Lower bound on the degree, used to rerun a sample at a larger `N`.
    pub degree_floor: usize,
    /// Fresh streams tried after a margin failure or a near-double root.
    pub max_resamples: u32,
}

impl GafSpec {
    pub fn new(window_radius: f64) -> Self {
        GafSpec {
            window_radius,
            tail_epsilon: 1e-3,
            max_degree: 1 << 14,
            degree_floor: 0,
            max_resamples: 8,
        }
    }

    fn validate(&self) -> Result<f64> {
        if !(self.tail_epsilon > 0.0 && self.tail_epsilon <= 1e-3) {
            return Err(SamplerError::Argument(format!(
                "tail_epsilon must lie in (0, 1e-3], got {}",
                self.tail_epsilon
            )));
        }
        window_rho(self.window_radius)
    }
}

fn complex_normal(rng: &mut ChaCha8Rng) -> C64 {
    let x: f64 = rng.sample(StandardNormal);
    let y: f64 = rng.sample(StandardNormal);
    C64::new(x, y) * std::f64::consts::FRAC_1_SQRT_2
}

/// The first `n + 1` coefficients `ξ_0..ξ_n` of stream `(seed, attempt)`.
///
/// Coefficients are drawn in order, so a larger `n` extends a smaller one.
pub fn gaf_coefficients(seed: u64, attempt: u64, n: usize) -> Vec<C64> {
    let mut rng = stream(seed, attempt);
    (0..=n).map(|_| complex_normal(&mut rng)).collect()
}

/// Zeros inside `B(o, R)` of the hyperbolic GAF `Σ ξ_n z^n`, `ξ_n` iid
/// standard complex Gaussians.
///
/// The series is truncated at the first degree `N = ⌈16/(1-ρ)⌉·2^k` for
/// which `6σ_N ≤ ε·min_{|z|=ρ}|S_N|`, `σ_N² = Σ_{n>N} ρ^{2n}`, and the
/// induced root shift `6σ_N/|S_N'|` is below `1e-10` for every zero in the
/// window.
pub fn sample_gaf(spec: &GafSpec, seed: u64) -> Result<Configuration> {
    let rho = spec.validate()?;
    let mut last_err = None;
    let mut rejected = 0u64;
    for attempt in 0..=spec.max_resamples as u64 {
        match gaf_attempt(spec, rho, seed, attempt) {
            Ok((points, degree, margin)) => {
                return Ok(Configuration {
                    points,
                    window_radius: spec.window_radius,
                    seed,
                    generator: Generator::Gaf,
                    d: 1,
                    meta: TruncationMeta {
                        degree,
                        tail_margin: margin,
                        accepted: 1,
                        rejected,
                    },
                })
            }
            Err(e @ (SamplerError::Margin { .. } | SamplerError::Numeric(_))) => {
                rejected += 1;
                last_err = Some(e);
            }
            Err(e) => return Err(e),
        }
    }
    Err(match last_err {
        Some(SamplerError::Margin { degree, ratio, .. }) => SamplerError::Margin {
            degree,
            attempts: spec.max_resamples + 1,
            ratio,
        },
        Some(e) => e,
        None => SamplerError::Numeric("no attempt was made".into()),
    })
}

fn tail_sigma(rho: f64, n: usize) -> f64 {
    // Σ_{k>n} ρ^{2k} = ρ^{2n+2}/(1-ρ²)
    let ln = (2 * n + 2) as f64 * rho.ln() - (-rho * rho).ln_1p();
    (0.5 * ln).exp()
}

fn gaf_attempt(spec: &GafSpec, rho: f64, seed: u64, attempt: u64) -> Result<(Vec<Point>, usize, f64)> {
    let mut n = ((16.0 / (1.0 - rho)).ceil() as usize).max(8);
    while n < spec.degree_floor {
        n *= 2;
    }
    let mut rng = stream(seed, attempt);
    let mut c: Vec<C64> = Vec::new();
    let nodes: Vec<C64> = (0..CIRCLE_NODES)
        .map(|k| C64::from_polar(rho, 2.0 * std::f64::consts::PI * k as f64 / CIRCLE_NODES as f64))
        .collect();
    let mut ratio = f64::INFINITY;
    loop {
        if n > spec.max_degree {
            return Err(SamplerError::Margin {
                degree: n / 2,
                attempts: 1,
                ratio,
            });
        }
        while c.len() <= n {
            c.push(complex_normal(&mut rng));
        }
        let sigma = SIGMAS * tail_sigma(rho, n);
        let node_min = nodes.iter().map(|&z| horner(&c, z).norm()).fold(f64::INFINITY, f64::min);
        if sigma / node_min > spec.tail_epsilon {
            ratio = sigma / node_min;
            n *= 2;
            continue;
        }
        let (inside, near_min) = window_roots(&c, rho)?;
        // Zeros closer to the circle than the node spacing are invisible to
        // the node minimum; |S_N| there is about |S_N'|·dist.
        ratio = sigma / node_min.min(near_min);
        if ratio > spec.tail_epsilon {
            n *= 2;
            continue;
        }
        let shift_ok = inside
            .iter()
            .all(|&z| sigma / horner_derivative(&c, z).norm() < SHIFT_TOL);
        if !shift_ok {
            n *= 2;
            continue;
        }
        for (i, a) in inside.iter().enumerate() {
            if inside[..i].iter().any(|b| (a - b).norm() < DOUBLE_ROOT_TOL) {
                return Err(SamplerError::Numeric("near-double zero in the window".into()));
            }
        }
        let points = inside
            .into_iter()
            .map(|z| Point::new(vec![z]))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        return Ok((points, n, ratio));
    }
}

/// Polished zeros of `c` with `|z| < ρ`, after a residual check, and the
/// linearised minimum of `|S_N|` on `|z| = ρ` near zeros within a few node
/// spacings of the circle.
fn window_roots(c: &[C64], rho: f64) -> Result<(Vec<C64>, f64)> {
    let scale = c.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let band = 4.0 * 2.0 * std::f64::consts::PI * rho / CIRCLE_NODES as f64;
    let mut out = Vec::new();
    let mut near_min = f64::INFINITY;
    for z in aberth_roots(c)? {
        if (z.norm() - rho).abs() > band && z.norm() > rho {
            continue;
        }
        let z = polish(c, z);
        let gap = (z.norm() - rho).abs();
        if gap <= band {
            near_min = near_min.min(horner_derivative(c, z).norm() * gap);
        }
        if z.norm() >= rho {
            continue;
        }
        let res = horner(c, z).norm();
        if res >= 1e-10 * scale {
            return Err(SamplerError::Numeric(format!("root residual {res:e} above tolerance")));
        }
        out.push(z);
    }
    Ok((out, near_min))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_sigma_closed_form() {
        let rho = 0.6f64;
        let direct: f64 = (11..4000).map(|k| rho.powi(2 * k)).sum::<f64>().sqrt();
        assert!((tail_sigma(rho, 10) - direct).abs() < 1e-14 * direct);
    }

    #[test]
    fn spec_validation() {
        let mut s = GafSpec::new(2.0);
        s.tail_epsilon = 0.1;
        assert!(sample_gaf(&s, 0).is_err());
        assert!(sample_gaf(&GafSpec::new(-1.0), 0).is_err());
    }
}
