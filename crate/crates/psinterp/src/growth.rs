use psdpp_quad::{integrate, integrate_to_inf, QuadError, Tolerance};
use statrs::function::gamma::ln_gamma;

use crate::function::{ln_sphere_moment, poisson_square_poly, Radius};
use crate::record::{is_unit, RkhsSpace};
use crate::{PsError, Result, TestFunction};

/// `ln B(a, b)`; for huge `a` the difference `lnΓ(a) - lnΓ(a+b)` comes from
/// its Stirling expansion to avoid cancellation.
fn ln_beta(a: f64, b: f64) -> f64 {
    if a > 1e7 && b < 1e3 {
        ln_gamma(b) - (b * a.ln() + 0.5 * b * (b - 1.0) / a)
    } else {
        ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
    }
}

/// `ln ∫_0^1 d t^{d-1} t^m (1-t)^{α+d-1} dt = ln(d B(m+d, α+d))`.
fn ln_radial_power(d: usize, m: f64, alpha: f64) -> f64 {
    (d as f64).ln() + ln_beta(m + d as f64, alpha + d as f64)
}

/// `∫ M(t) d t^{d-1}(1-t)^{α+d-1} dt` for `M = (1-t)^{-d} Σ q_k t^k`.
fn poisson_weighted(d: usize, alpha: f64) -> f64 {
    poisson_square_poly(d)
        .iter()
        .enumerate()
        .map(|(k, q)| q * d as f64 * ln_beta((d + k) as f64, alpha).exp())
        .sum()
}

/// Tempered functional `α² ∫ ‖F(x)‖² (1-|x|²)^{α+d-1} dv_d(x)`.
///
/// The sphere average of `|f|²` is taken analytically for every built-in
/// kind, leaving Beta integrals in `t = |x|²`. A divergent integral gives
/// `+∞`.
pub fn tempered_functional(f: &TestFunction, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(PsError::Argument(format!("α must be positive, got {alpha}")));
    }
    let d = f.dim();
    let integral = match f {
        TestFunction::Constant { value, .. } => value.norm_sqr() * ln_radial_power(d, 0.0, alpha).exp(),
        TestFunction::Monomial { alpha: a } => {
            let n: u32 = a.iter().sum();
            (ln_sphere_moment(a) + ln_radial_power(d, n as f64, alpha)).exp()
        }
        TestFunction::Poisson { .. } | TestFunction::PoissonSzego { .. } => poisson_weighted(d, alpha),
        TestFunction::Lacunary { terms } => terms
            .iter()
            .map(|&(k, c)| (2.0 * c.abs().ln() + ln_radial_power(1, 2f64.powi(k as i32), alpha)).exp())
            .sum(),
        TestFunction::Pluriharmonic { holo, anti, .. } => holo
            .iter()
            .chain(anti)
            .map(|(a, c)| {
                let n: u32 = a.iter().sum();
                c.norm_sqr() * (ln_sphere_moment(a) + ln_radial_power(d, n as f64, alpha)).exp()
            })
            .sum(),
        TestFunction::HardyAtomic { space, .. } => {
            let RkhsSpace::Hardy { weights, .. } = space.as_ref() else {
                unreachable!("hardy functions carry a Hardy space")
            };
            weights.iter().sum::<f64>() * poisson_weighted(d, alpha)
        }
        TestFunction::KernelSection { space } => {
            let RkhsSpace::Kernel(k) = space.as_ref() else {
                return Err(PsError::Contract("kernel section without a kernel".into()));
            };
            // a_n ≳ n^d, so the coefficient sum behaves like Σ n^{-α}.
            if alpha <= 1.0 {
                return Ok(f64::INFINITY);
            }
            if is_unit(k) {
                // ‖F(x)‖² = (1-t)^{-(d+1)}
                d as f64 * ln_beta(d as f64, alpha - 1.0).exp()
            } else {
                let terms: Vec<f64> = k
                    .coeffs
                    .iter()
                    .enumerate()
                    .map(|(n, a)| a * ln_radial_power(d, n as f64, alpha).exp())
                    .collect();
                let n = terms.len() as f64;
                let last = *terms.last().unwrap_or(&0.0);
                // integral comparison for the dropped terms ~ n^{-α}
                terms.iter().sum::<f64>() + last * n / (alpha - 1.0)
            }
        }
    };
    Ok(alpha * alpha * integral)
}

fn radial_density(d: usize, delta: f64) -> f64 {
    let df = d as f64;
    df / 4f64.powi(d as i32) * (-(-delta).exp_m1()).powi(2 * d as i32 - 1) * (1.0 + (-delta).exp())
}

/// `e^{-2kd} ∫_{A_k(o)} ‖F‖² dμ` for `k = 0..=k_max`.
pub fn mean_growth_profile(f: &TestFunction, k_max: u64) -> Result<Vec<f64>> {
    let d = f.dim();
    let df = d as f64;
    let mut out = Vec::with_capacity(k_max as usize + 1);
    for k in 0..=k_max {
        let kf = k as f64;
        let mut bad = false;
        let g = |delta: f64| {
            let ln_m = f.ln_sphere_mean_sq(Radius::hyperbolic(delta.max(1e-300)));
            if ln_m == f64::INFINITY {
                bad = true;
                return 0.0;
            }
            (ln_m + df * delta - 2.0 * kf * df).exp() * radial_density(d, delta)
        };
        let v = match integrate(g, kf, kf + 1.0, Tolerance::new(0.0, 1e-10)) {
            Ok(i) => i.value,
            Err(QuadError::NotConverged { value, .. }) => value,
            Err(e) => return Err(e.into()),
        };
        if bad {
            return Err(PsError::Domain(format!(
                "annular mean of {} is not computable on A_{k}",
                f.label()
            )));
        }
        out.push(v);
    }
    Ok(out)
}

/// `∫ e^{-2s d_B(x, o)} ‖F(x)‖² dμ(x)`, `+∞` when it diverges.
///
/// Twice this bounds the variance of `g_X(s, o; f)`.
pub fn weighted_square_integral(f: &TestFunction, s: f64) -> Result<f64> {
    let d = f.dim();
    let df = d as f64;
    if !(s > df) {
        return Err(PsError::Domain(format!("s = {s} must exceed d = {d}")));
    }
    let eps = 2.0 * s - df;
    let g = |y: f64| {
        let delta = y / eps;
        let ln_m = f.ln_sphere_mean_sq(Radius::hyperbolic(delta.max(1e-300)));
        (ln_m + (df - 2.0 * s) * delta).exp() * radial_density(d, delta) / eps
    };
    let (g1, g_far) = (g(1.0), g(400.0));
    if !g_far.is_finite() || g_far > 1e-30 * g1 {
        return Ok(f64::INFINITY);
    }
    Ok(match integrate_to_inf(g, 0.0, Tolerance::new(0.0, 1e-9)) {
        Ok(i) => i.value,
        Err(QuadError::NotConverged { value, .. }) => value,
        Err(e) => return Err(e.into()),
    })
}
