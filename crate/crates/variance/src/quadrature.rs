use psdpp_hypgeom::Point;
use psdpp_kernels::{DsharpSeries, KernelCoeffs};
use psdpp_psinterp::TestFunction;
use statrs::function::gamma::ln_gamma;

use crate::radial::{eps_u, ln_abs_diff_exp, symmetric_pair_integral, Radial, V_MAX};
use crate::{Result, VarError, VarianceReport};

const REL_TOL: f64 = 1e-9;

/// Monomial exponents past which a lacunary sum is cut once its terms are
/// negligible.
const LACUNARY_REL: f64 = 1e-14;

/// Modes at least this large use the large-`n` expansion.
const ASYMPTOTIC_N: f64 = 1048576.0;

/// `Var Σ_x Φ(φ_z(x)) f(x)` under the disk Bergman process.
///
/// After Möbius transport to the origin the variance is
/// `½∬|Φ(x)f - Φ(y)f|² |K_D(x,y)|² dA dA`. For `f ≡ c` the angular average of
/// `|K_D|²` is `(1+u)/(1-u)³`, `u = |xy|²`. For `f = z^n` at `z = o` the
/// angular modes of `|K_D|²` give the extra kernel
/// `u^{n/2}[2/(1-u)³ + (n-1)/(1-u)²]`; lacunary and pluriharmonic `f` split
/// into orthogonal monomial modes.
///
/// Functions that are not radial about `z` after that reduction are a
/// contract error.
pub fn var_scalar_quadrature(weight: &Radial, f: &TestFunction, z: &Point) -> Result<VarianceReport> {
    if z.dim() != 1 || f.dim() != 1 {
        return Err(VarError::Argument("the variance quadrature is implemented on the disk".into()));
    }
    let at_origin = z.norm_sqr() == 0.0;
    let modes: Vec<(u64, f64)> = match f {
        TestFunction::Constant { value, .. } => vec![(0, value.norm_sqr())],
        _ if !at_origin => {
            return Err(VarError::Contract(format!(
                "{} is not radial about z; only constants are transported",
                f.label()
            )))
        }
        TestFunction::Monomial { alpha } => vec![(alpha[0] as u64, 1.0)],
        TestFunction::Lacunary { .. } => Vec::new(),
        TestFunction::Pluriharmonic { holo, anti, .. } => holo
            .iter()
            .chain(anti)
            .map(|(a, c)| (a[0] as u64, c.norm_sqr()))
            .collect(),
        _ => {
            return Err(VarError::Contract(format!(
                "{} does not reduce to radial monomial modes",
                f.label()
            )))
        }
    };
    let (value, err) = if let TestFunction::Lacunary { terms } = f {
        lacunary_variance(weight, terms)?
    } else {
        let mut value = 0.0;
        let mut err = 0.0;
        for (n, w) in modes {
            if w == 0.0 {
                continue;
            }
            let (v, e) = monomial_mode(weight, n as f64)?;
            value += w * v;
            err += w * e;
        }
        (value, err)
    };
    Ok(VarianceReport::quadrature(format!("g[{};{}]", weight.label(), f.label()), value, err)
        .with_meta("z", format!("{}", z.coords()[0]).replace(',', ";")))
}

/// Lacunary exponents `2^k` may exceed `u64`, so they are handled in `f64`.
fn lacunary_variance(weight: &Radial, terms: &[(u32, f64)]) -> Result<(f64, f64)> {
    let (mut value, mut err) = (0.0, 0.0);
    let mut small = 0;
    for &(k, c) in terms {
        let (v, e) = monomial_mode(weight, 2f64.powi(k as i32))?;
        let term = c * c * v;
        value += term;
        err += c * c * e;
        // terms decay geometrically once past the peak of c_k² V(2^k)
        small = if term < LACUNARY_REL * value { small + 1 } else { 0 };
        if small >= 8 {
            break;
        }
    }
    Ok((value, err))
}

/// Variance of `Σ Φ(x) x^n`, `(value, error estimate)`.
fn monomial_mode(weight: &Radial, n: f64) -> Result<(f64, f64)> {
    if n >= ASYMPTOTIC_N {
        return match weight {
            Radial::Poincare { s } => Ok((poincare_mode_asymptotic(*s, n), 0.0)),
            Radial::Profile(p) if p.is_compact() => {
                // t^{n/2} ≤ tanh(R/2)^n on the support
                let r = (0.5 * p.support_radius()).tanh();
                let sup = (n * r.ln()).exp();
                if sup < 1e-300 {
                    Ok((0.0, 0.0))
                } else {
                    Err(VarError::Numeric(format!("mode {n} of {} is out of range", p.label())))
                }
            }
            Radial::Profile(p) => Err(VarError::Numeric(format!("mode {n} of {} is out of range", p.label()))),
        };
    }
    let half_n = 0.5 * n;
    let lnp = |v: f64| {
        let (sg, l) = weight.ln_value(v);
        let lt = if n == 0.0 { 0.0 } else { half_n * (-(-v).exp_m1()).ln() };
        (sg, l + lt)
    };
    let f = |v1: f64, v2: f64| {
        let (s1, l1) = lnp(v1);
        let (s2, l2) = lnp(v2);
        if l1 == f64::NEG_INFINITY && l2 == f64::NEG_INFINITY {
            return 0.0;
        }
        let (ln_eps, u) = eps_u(v1, v2);
        let measure = -v1 - v2;
        let ln_diff = if s1 == s2 {
            ln_abs_diff_exp(l1, l2)
        } else {
            let (hi, lo) = if l1 >= l2 { (l1, l2) } else { (l2, l1) };
            hi + (lo - hi).exp().ln_1p()
        };
        let kernel0 = u.ln_1p() - 3.0 * ln_eps;
        let mut out = (-std::f64::consts::LN_2 + 2.0 * ln_diff + kernel0 + measure).exp();
        if n > 0.0 && s1 * s2 != 0.0 {
            let num = mode_gap(ln_eps.exp(), n);
            if num != 0.0 {
                out += s1 * s2 * num.signum() * (l1 + l2 + num.abs().ln() - 3.0 * ln_eps + measure).exp();
            }
        }
        out
    };
    let mut breaks = weight.v_breaks();
    if n > 1.0 {
        let peak = (0.5 * n).ln();
        breaks.extend([-3.0, 0.0, 3.0, 8.0].iter().map(|d| peak + d).filter(|b| *b > 0.0));
    }
    let extent = if weight.is_compact() { f64::INFINITY } else { V_MAX };
    let i = symmetric_pair_integral(f, &breaks, weight.v_support(), extent, REL_TOL)?;
    Ok((i.value, i.error))
}

/// `V(n) ≈ (Γ(2s+1) - Γ(s+1)²) 16^{-s} n^{1-2s} / (2s(2s-1))` for the
/// Poincaré weight. The relative error is about `n^{-2}`.
fn poincare_mode_asymptotic(s: f64, n: f64) -> f64 {
    let lg = ln_gamma(2.0 * s + 1.0);
    let c = lg + (-(2.0 * ln_gamma(s + 1.0) - lg).exp()).ln_1p();
    (c - s * 16f64.ln() + (1.0 - 2.0 * s) * n.ln() - (2.0 * s * (2.0 * s - 1.0)).ln()).exp()
}

/// `(1+u) - u^{n/2}(2 + (n-1)ε)` with `ε = 1 - u`, the numerator of the
/// difference between the `n = 0` and the `n`-th mode kernel.
///
/// With `L = (n/2) ln(1-ε)` it equals
/// `n(-ln(1-ε) - ε) - 2(e^L - 1 - L) - (n-1)ε(e^L - 1)`, whose terms are all
/// of the size `n²ε²` of the result.
fn mode_gap(eps: f64, n: f64) -> f64 {
    let g = if eps < 1e-3 {
        (2..=8).map(|k| eps.powi(k) / k as f64).sum::<f64>()
    } else {
        -(-eps).ln_1p() - eps
    };
    let l = 0.5 * n * (-eps).ln_1p();
    let e = l.exp_m1();
    let h = if l.abs() < 1e-3 {
        l * l * (0.5 + l * (1.0 / 6.0 + l * (1.0 / 24.0 + l / 120.0)))
    } else {
        e - l
    };
    n * g - 2.0 * h - (n - 1.0) * eps * e
}

/// `Var M_X` for `M_X = Σ Φ(x) K_W(·, x)` in `A²(W)`, at `z = o`.
///
/// Equals `½∬|Φ(x) - Φ(y)|² D^♯(|xy|) dA dA` with the angular average
/// `D^♯` of `K_W(x,y)|K_D(x,y)|²`.
pub fn var_kernel_weighted(coeffs: &KernelCoeffs, weight: &Radial) -> Result<VarianceReport> {
    let ds = DsharpSeries::tabulated(coeffs)?;
    let f = |v1: f64, v2: f64| {
        let ld = weight.ln_abs_diff(v1, v2);
        if ld == f64::NEG_INFINITY {
            return 0.0;
        }
        let (ln_eps, _) = eps_u(v1, v2);
        match ds.ln_scaled(ln_eps.exp()) {
            Ok(ls) => (-std::f64::consts::LN_2 + 2.0 * ld + ls - 4.0 * ln_eps - v1 - v2).exp(),
            Err(_) => f64::NAN,
        }
    };
    let extent = if weight.is_compact() { f64::INFINITY } else { V_MAX };
    let i = symmetric_pair_integral(f, &weight.v_breaks(), weight.v_support(), extent, REL_TOL)?;
    Ok(
        VarianceReport::quadrature(format!("M[{};{}]", weight.label(), coeffs.weight_id), i.value, i.error)
            .with_meta("tail", format!("{:e}", ds.table_tail())),
    )
}
