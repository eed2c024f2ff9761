use std::ops::Range;
use std::sync::Arc;

use psdpp_hypgeom::{Point, C64};
use psdpp_kernels::RadialProfile;
use psdpp_psinterp::{poincare_series, ps_generalized, ps_weighted_sum, RkhsSpace, SectionRecord, TestFunction};
use psdpp_sampler::{sample_gaf, sample_hkpv, Configuration, GafSpec, HkpvSpec};

use crate::radial::Radial;
use crate::{Method, Result, VarError, VarianceReport};

/// Fewest configurations accepted by [`var_mc`].
pub const MIN_SEEDS: usize = 200;

/// A linear statistic of a configuration.
#[derive(Debug, Clone)]
pub enum McStatistic {
    /// `#{x : d_B(x, z) < radius}`.
    Count { radius: f64, z: Point },
    /// `Σ e^{-s d_B(x, z)}` over the window.
    Poincare { s: f64, z: Point },
    /// `Σ e^{-s d_B(x, z)} f(x)` over the window, for scalar `f`.
    Weighted { s: f64, z: Point, f: TestFunction },
    /// `g^R_X(z; F)` with `F(x) = K(·, x)` in `space`; the variance is
    /// `E‖g - g^R_P F(z)‖²`.
    Kernel {
        profile: RadialProfile,
        z: Point,
        space: Arc<RkhsSpace>,
    },
}

impl McStatistic {
    pub fn label(&self) -> String {
        match self {
            McStatistic::Count { radius, .. } => format!("count({radius})"),
            McStatistic::Poincare { s, .. } => format!("poincare({s})"),
            McStatistic::Weighted { s, f, .. } => format!("g[poincare({s});{}]", f.label()),
            McStatistic::Kernel { profile, .. } => format!("gR[{};F]", profile.label()),
        }
    }

    fn z(&self) -> &Point {
        match self {
            McStatistic::Count { z, .. }
            | McStatistic::Poincare { z, .. }
            | McStatistic::Weighted { z, .. }
            | McStatistic::Kernel { z, .. } => z,
        }
    }
}

#[derive(Debug, Clone)]
pub enum SamplerSpec {
    Gaf(GafSpec),
    Hkpv(HkpvSpec),
}

impl SamplerSpec {
    pub fn sample(&self, seed: u64) -> Result<Configuration> {
        Ok(match self {
            SamplerSpec::Gaf(g) => sample_gaf(g, seed)?,
            SamplerSpec::Hkpv(h) => sample_hkpv(h, seed)?,
        })
    }
}

/// Per-configuration values: the statistic itself, or for a vector-valued
/// statistic the squared distance to its known mean.
enum Values {
    Scalar(Vec<C64>),
    Centered(Vec<f64>),
}

struct Evaluator<'a> {
    stat: &'a McStatistic,
    profile: Option<RadialProfile>,
    one: TestFunction,
    mean_record: Option<SectionRecord>,
}

impl<'a> Evaluator<'a> {
    fn new(stat: &'a McStatistic) -> Result<Self> {
        let z = stat.z();
        let (profile, mean_record, one) = match stat {
            McStatistic::Count { radius, .. } => (Some(RadialProfile::indicator(*radius)), None, TestFunction::one(z.dim())),
            McStatistic::Kernel { profile, space, .. } => {
                // E g^R_X(z; F) = g^R_P F(z) by the mean-value property
                let mass = Radial::Profile(profile.clone()).mass()?;
                let mut r = SectionRecord::new(space.clone());
                r.push(z.clone(), C64::new(mass, 0.0));
                let f = TestFunction::KernelSection { space: space.clone() };
                (Some(profile.clone()), Some(r), f)
            }
            _ => (None, None, TestFunction::one(z.dim())),
        };
        Ok(Evaluator {
            stat,
            profile,
            one,
            mean_record,
        })
    }

    fn scalar(&self, x: &Configuration) -> Result<C64> {
        Ok(match self.stat {
            McStatistic::Count { z, .. } => {
                let p = self.profile.as_ref().expect("count profile");
                C64::new(ps_generalized(x, p, z, &self.one)?.g_r, 0.0)
            }
            McStatistic::Poincare { s, z } => C64::new(poincare_series(x, *s, z)?.value, 0.0),
            McStatistic::Weighted { s, z, f } => ps_weighted_sum(x, *s, z, f, Some(u64::MAX))?
                .g_f
                .scalar()
                .ok_or_else(|| VarError::Contract(format!("{} is vector-valued", f.label())))?,
            McStatistic::Kernel { .. } => unreachable!("vector-valued statistic"),
        })
    }

    fn centered(&self, x: &Configuration) -> Result<f64> {
        let (McStatistic::Kernel { z, .. }, Some(p), Some(mean)) = (self.stat, &self.profile, &self.mean_record) else {
            unreachable!("scalar statistic")
        };
        let g = ps_generalized(x, p, z, &self.one)?;
        let rec = g
            .g_r_f
            .record()
            .ok_or_else(|| VarError::Contract("kernel statistic produced a scalar".into()))?;
        Ok(rec.sub(mean)?.norm_sqr()?)
    }

    fn values(&self, configs: &[Configuration]) -> Result<Values> {
        if matches!(self.stat, McStatistic::Kernel { .. }) {
            Ok(Values::Centered(configs.iter().map(|x| self.centered(x)).collect::<Result<_>>()?))
        } else {
            Ok(Values::Scalar(configs.iter().map(|x| self.scalar(x)).collect::<Result<_>>()?))
        }
    }
}

/// Unbiased sample variance `Σ|x_i - x̄|²/(n-1)` and its delete-1 jackknife
/// standard error.
pub fn jackknife_variance(xs: &[C64]) -> Result<(f64, f64)> {
    let n = xs.len();
    if n < 3 {
        return Err(VarError::Argument(format!("{n} values are too few for a jackknife")));
    }
    let nf = n as f64;
    let mean = xs.iter().sum::<C64>() / nf;
    // centred sums keep the leave-one-out updates free of cancellation
    let s1: C64 = xs.iter().map(|x| x - mean).sum();
    let s2: f64 = xs.iter().map(|x| (x - mean).norm_sqr()).sum();
    let var = (s2 - s1.norm_sqr() / nf) / (nf - 1.0);
    let m = nf - 1.0;
    let loo: Vec<f64> = xs
        .iter()
        .map(|x| {
            let d = x - mean;
            let a = s1 - d;
            let b = s2 - d.norm_sqr();
            (b - a.norm_sqr() / m) / (m - 1.0)
        })
        .collect();
    let loo_mean = loo.iter().sum::<f64>() / nf;
    let ss: f64 = loo.iter().map(|v| (v - loo_mean).powi(2)).sum();
    Ok((var.max(0.0), ((nf - 1.0) / nf * ss).sqrt()))
}

/// Empirical variance of `stat` over configurations sampled at `seeds`,
/// spread over `threads` workers. The result does not depend on `threads`.
pub fn var_mc(stat: &McStatistic, spec: &SamplerSpec, seeds: Range<u64>, threads: usize) -> Result<VarianceReport> {
    let n = seeds.end.saturating_sub(seeds.start) as usize;
    if n < MIN_SEEDS {
        return Err(VarError::Argument(format!("{n} seeds given, at least {MIN_SEEDS} needed")));
    }
    let seeds: Vec<u64> = seeds.collect();
    let threads = threads.clamp(1, n);
    let chunk = n.div_ceil(threads);
    let parts: Vec<Result<Vec<Configuration>>> = std::thread::scope(|sc| {
        let handles: Vec<_> = seeds
            .chunks(chunk)
            .map(|c| sc.spawn(move || c.iter().map(|&s| spec.sample(s)).collect::<Result<Vec<_>>>()))
            .collect();
        handles.into_iter().map(|h| h.join().expect("sampler thread panicked")).collect()
    });
    let mut configs = Vec::with_capacity(n);
    for p in parts {
        configs.extend(p?);
    }
    var_mc_configs(stat, &configs)
}

/// As [`var_mc`] on configurations already sampled.
pub fn var_mc_configs(stat: &McStatistic, configs: &[Configuration]) -> Result<VarianceReport> {
    let n = configs.len();
    if n < MIN_SEEDS {
        return Err(VarError::Argument(format!("{n} configurations given, at least {MIN_SEEDS} needed")));
    }
    let (value, err) = match Evaluator::new(stat)?.values(configs)? {
        Values::Scalar(xs) => jackknife_variance(&xs)?,
        Values::Centered(ys) => {
            // known mean: the variance is the plain average
            let nf = n as f64;
            let m = ys.iter().sum::<f64>() / nf;
            let sd = (ys.iter().map(|y| (y - m).powi(2)).sum::<f64>() / (nf - 1.0)).sqrt();
            (m, sd / nf.sqrt())
        }
    };
    let z = stat.z();
    Ok(VarianceReport {
        statistic: stat.label(),
        method: Method::Mc,
        value,
        err,
        n_samples: Some(n),
        meta: Vec::new(),
    }
    .with_meta("z", z.norm())
    .with_meta("generator", configs[0].generator))
}
