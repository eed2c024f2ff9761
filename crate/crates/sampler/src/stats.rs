use psdpp_hypgeom::{ball_volume, bergman_distance, disk};
use psdpp_quad::{integrate, Tolerance};

use crate::{Configuration, Result, SamplerError};

const MIN_CONFIGS: usize = 100;
const PAIR_BINS: usize = 8;

/// Expected number of points with `|z| < t`: `t^{2d}/(1-t²)^d`.
pub fn count_mean(d: usize, t: f64) -> f64 {
    let t2 = t * t;
    (d as f64 * (t2.ln() - (-t2).ln_1p())).exp()
}

/// Variance of the number of points with `|z| < t`.
///
/// The restricted kernel has eigenvalues `λ_n = t^{2(n+d)}` with
/// multiplicity `C(n+d-1, d-1)`, so `Var = Σ mult·(λ_n - λ_n²)`, which sums
/// to `t^{2d}/(1-t²)^d - t^{4d}/(1-t⁴)^d`.
pub fn count_variance(d: usize, t: f64) -> f64 {
    let t2 = t * t;
    let t4 = t2 * t2;
    let df = d as f64;
    count_mean(d, t) - (df * (t4.ln() - (-t4).ln_1p())).exp()
}

/// `1 - |K(x,y)|²/(K(x,x)K(y,y)) = 1 - cosh^{-2(d+1)}(δ/2)` at distance `δ`.
pub fn pair_ratio_theory(d: usize, delta: f64) -> f64 {
    1.0 - (0.5 * delta).cosh().powi(-2 * (d as i32 + 1))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadiusStats {
    /// Hyperbolic radius of the ball `B(o, r)`.
    pub radius: f64,
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
    pub expected_mean: f64,
    pub expected_variance: f64,
    /// `(mean - expected)/sqrt(var/n)` with the empirical variance.
    pub mean_z: f64,
    pub variance_rel_err: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairBin {
    pub lo: f64,
    pub hi: f64,
    pub pairs: u64,
    pub empirical: f64,
    pub theory: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StatsReport {
    pub radii: Vec<RadiusStats>,
    pub pairs: Vec<PairBin>,
}

/// Bin average of `1 - cosh^{-2(d+1)}(δ/2)` against `dμ`.
///
/// With `s = sinh²(δ/2)` the radial measure is `d s^{d-1} ds` and the
/// kernel factor is `(1+s)^{-(d+1)}`.
fn pair_bin_theory(d: usize, lo: f64, hi: f64) -> Result<f64> {
    let (sa, sb) = ((0.5 * lo).sinh().powi(2), (0.5 * hi).sinh().powi(2));
    let df = d as f64;
    let f = |s: f64| df * s.powi(d as i32 - 1) * (1.0 + s).powi(-(d as i32 + 1));
    let corr = integrate(f, sa, sb, Tolerance::new(1e-14, 1e-11))
        .map_err(|e| SamplerError::Numeric(e.to_string()))?
        .value;
    let mass = sb.powi(d as i32) - sa.powi(d as i32);
    Ok(1.0 - corr / mass)
}

/// Empirical count statistics at each hyperbolic radius and the distance
/// binned pair-correlation ratio, against the analytic values.
///
/// Pair ratios use first points in `B(o, R - δ_max)`, `δ_max = min(2, R/2)`,
/// so every partner at distance `≤ δ_max` lies in the window; the Poisson
/// reference is `μ(B(o, R - δ_max))·μ(bin)` by invariance.
pub fn validate_statistics(configs: &[Configuration], radii: &[f64]) -> Result<StatsReport> {
    if configs.len() < MIN_CONFIGS {
        return Err(SamplerError::Argument(format!(
            "need at least {MIN_CONFIGS} configurations, got {}",
            configs.len()
        )));
    }
    let first = &configs[0];
    let (d, window, generator) = (first.d, first.window_radius, first.generator);
    if configs
        .iter()
        .any(|c| c.d != d || c.window_radius != window || c.generator != generator)
    {
        return Err(SamplerError::Argument("configurations do not share one generator and spec".into()));
    }
    let n = configs.len();
    let nf = n as f64;
    let mut radius_stats = Vec::with_capacity(radii.len());
    for &r in radii {
        if !(r > 0.0 && r <= window) {
            return Err(SamplerError::Argument(format!("radius {r} outside the window (0, {window}]")));
        }
        let counts: Vec<f64> = configs.iter().map(|c| c.count_in_ball(r) as f64).collect();
        let mean = counts.iter().sum::<f64>() / nf;
        let variance = counts.iter().map(|c| (c - mean) * (c - mean)).sum::<f64>() / (nf - 1.0);
        let t = disk::euclidean_radius(r);
        let expected_mean = ball_volume(r, d);
        let expected_variance = count_variance(d, t);
        radius_stats.push(RadiusStats {
            radius: r,
            n,
            mean,
            variance,
            expected_mean,
            expected_variance,
            mean_z: (mean - expected_mean) / (variance / nf).sqrt(),
            variance_rel_err: variance / expected_variance - 1.0,
        });
    }

    let dmax = 2f64.min(0.5 * window);
    let inner = disk::euclidean_radius(window - dmax);
    let width = dmax / PAIR_BINS as f64;
    let mut hist = [0u64; PAIR_BINS];
    for c in configs {
        for (i, x) in c.points.iter().enumerate() {
            if x.norm() >= inner {
                continue;
            }
            for (j, y) in c.points.iter().enumerate() {
                if i == j {
                    continue;
                }
                let delta = bergman_distance(x, y)?;
                if delta < dmax {
                    hist[((delta / width) as usize).min(PAIR_BINS - 1)] += 1;
                }
            }
        }
    }
    let centre_mass = ball_volume(window - dmax, d);
    let mut pairs = Vec::with_capacity(PAIR_BINS);
    for (b, &count) in hist.iter().enumerate() {
        let (lo, hi) = (b as f64 * width, (b + 1) as f64 * width);
        let bin_mass = ball_volume(hi, d) - ball_volume(lo, d);
        pairs.push(PairBin {
            lo,
            hi,
            pairs: count,
            empirical: count as f64 / (nf * centre_mass * bin_mass),
            theory: pair_bin_theory(d, lo, hi)?,
        });
    }
    Ok(StatsReport {
        radii: radius_stats,
        pairs,
    })
}
