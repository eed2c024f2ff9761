use psdpp_hypgeom::disk::ln_one_minus_r2;
use psdpp_hypgeom::poincare_mass_disk;
use psdpp_kernels::RadialProfile;
use psdpp_quad::{integrate, integrate_breaks, integrate_to_inf, Integral, QuadError, Tolerance};

use crate::{Result, VarError};

/// Largest `v` handled: `ε = 1 - t₁t₂` stays above `e^{-700}`.
pub(crate) const V_MAX: f64 = 690.0;

/// A radial weight about the evaluation point, as a function on the disk.
#[derive(Debug, Clone)]
pub enum Radial {
    /// `e^{-s d_B(·, z)}`.
    Poincare { s: f64 },
    Profile(RadialProfile),
}

impl Radial {
    pub fn poincare(s: f64) -> Result<Self> {
        if !(s > 1.0 && s.is_finite()) {
            return Err(VarError::Domain(format!("s = {s} must exceed 1")));
        }
        Ok(Radial::Poincare { s })
    }

    pub fn label(&self) -> String {
        match self {
            Radial::Poincare { s } => format!("poincare({s})"),
            Radial::Profile(p) => p.label().to_string(),
        }
    }

    pub fn is_compact(&self) -> bool {
        matches!(self, Radial::Profile(p) if p.is_compact())
    }

    /// `v` beyond which the weight vanishes.
    pub(crate) fn v_support(&self) -> f64 {
        match self {
            Radial::Profile(p) if p.is_compact() => v_of_rho(p.support_radius()),
            _ => f64::INFINITY,
        }
    }

    /// Kinks and jumps in `v`, including the support edge.
    pub(crate) fn v_breaks(&self) -> Vec<f64> {
        match self {
            Radial::Poincare { .. } => Vec::new(),
            Radial::Profile(p) => p.breaks().iter().map(|&b| v_of_rho(b)).collect(),
        }
    }

    /// `(sign, ln|Φ|)` at `v`; `ln|Φ| = -∞` for a zero value.
    pub(crate) fn ln_value(&self, v: f64) -> (f64, f64) {
        match self {
            Radial::Poincare { s } => (1.0, -s * rho_of_v(v)),
            Radial::Profile(p) => {
                let x = p.eval_hyperbolic(rho_of_v(v));
                (x.signum(), x.abs().ln())
            }
        }
    }

    /// `ln|Φ(v₁) - Φ(v₂)|`.
    pub(crate) fn ln_abs_diff(&self, v1: f64, v2: f64) -> f64 {
        match self {
            Radial::Poincare { .. } => {
                let (_, a) = self.ln_value(v1);
                let (_, b) = self.ln_value(v2);
                ln_abs_diff_exp(a, b)
            }
            Radial::Profile(p) => (p.eval_hyperbolic(rho_of_v(v1)) - p.eval_hyperbolic(rho_of_v(v2)))
                .abs()
                .ln(),
        }
    }

    /// `g^R_P = ∫ Φ dμ`, the mean of the unweighted statistic.
    pub fn mass(&self) -> Result<f64> {
        match self {
            Radial::Poincare { s } => Ok(poincare_mass_disk(*s)),
            Radial::Profile(p) => {
                // dμ = e^{v} dv in the radial variable
                let g = |v: f64| p.eval_hyperbolic(rho_of_v(v)) * v.exp();
                let tol = Tolerance::new(0.0, 1e-12);
                if p.is_compact() {
                    let mut pts = vec![0.0];
                    pts.extend(self.v_breaks());
                    Ok(value_of(integrate_breaks(g, &pts, tol))?)
                } else if p.integrable_flag() {
                    Ok(value_of(integrate_to_inf(g, 0.0, tol))?)
                } else {
                    Err(VarError::Contract(format!("profile {} has infinite mass", p.label())))
                }
            }
        }
    }
}

/// `v = -ln(1 - tanh²(ρ/2))`.
pub(crate) fn v_of_rho(rho: f64) -> f64 {
    -ln_one_minus_r2(rho)
}

/// Inverse of [`v_of_rho`]: `ρ = v + 2 ln(1 + r)`, `r² = 1 - e^{-v}`.
pub(crate) fn rho_of_v(v: f64) -> f64 {
    let r = (-(-v).exp_m1()).sqrt();
    v + 2.0 * r.ln_1p()
}

/// `ln|e^a - e^b|`.
pub(crate) fn ln_abs_diff_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    hi + (-(lo - hi).exp_m1()).ln()
}

/// `(ln ε, u)` with `ε = 1 - t₁t₂`, `u = t₁t₂`, `t_i = 1 - e^{-v_i}`.
pub(crate) fn eps_u(v1: f64, v2: f64) -> (f64, f64) {
    let (lo, hi) = if v1 <= v2 { (v1, v2) } else { (v2, v1) };
    let ln_eps = -lo + ((-(hi - lo)).exp() - (-hi).exp()).ln_1p();
    let u = (-(-v1).exp_m1()) * (-(-v2).exp_m1());
    (ln_eps, u)
}

pub(crate) fn value_of(r: std::result::Result<Integral, QuadError>) -> Result<f64> {
    Ok(integral_of(r)?.value)
}

/// Accepts a non-converged estimate; its error estimate is carried along.
pub(crate) fn integral_of(r: std::result::Result<Integral, QuadError>) -> Result<Integral> {
    match r {
        Ok(i) => Ok(i),
        Err(QuadError::NotConverged { value, error, .. }) => Ok(Integral { value, error, evals: 0 }),
        Err(e) => Err(e.into()),
    }
}

/// `∬_{[0,∞)²} f(v₁, v₂) dv₁ dv₂` for a symmetric `f`, computed as twice the
/// integral over `v₂ < v₁`.
///
/// `breaks` are kinks of `f` in either variable; past `support` the
/// integrand is assumed to vanish once both variables exceed it. `extent`
/// caps the outer variable.
pub(crate) fn symmetric_pair_integral<F>(f: F, breaks: &[f64], support: f64, extent: f64, rel: f64) -> Result<Integral>
where
    F: Fn(f64, f64) -> f64,
{
    let inner_tol = Tolerance::new(0.0, rel * 0.1).with_max_intervals(400);
    let outer_tol = Tolerance::new(0.0, rel).with_max_intervals(1000);
    let mut bs: Vec<f64> = breaks.iter().copied().filter(|b| *b > 0.0 && *b < extent).collect();
    bs.sort_by(f64::total_cmp);
    bs.dedup();
    let mut inner_rel = 0f64;
    let mut outer = |v1: f64| {
        let top = v1.min(support);
        let mut pts = vec![0.0];
        pts.extend(bs.iter().copied().filter(|b| *b < top));
        pts.push(top);
        match integral_of(integrate_breaks(|v2| f(v1, v2), &pts, inner_tol)) {
            Ok(i) => {
                if i.value != 0.0 {
                    inner_rel = inner_rel.max(i.error / i.value.abs());
                }
                i.value
            }
            Err(_) => f64::NAN,
        }
    };
    let mut pts = vec![0.0];
    pts.extend(bs.iter().copied());
    let total = if extent.is_finite() {
        pts.push(extent);
        integral_of(integrate_breaks(&mut outer, &pts, outer_tol))?
    } else {
        let last = *pts.last().unwrap_or(&0.0);
        let head = if pts.len() > 1 {
            integral_of(integrate_breaks(&mut outer, &pts, outer_tol))?
        } else {
            Integral { value: 0.0, error: 0.0, evals: 0 }
        };
        head + integral_of(integrate_to_inf(&mut outer, last, outer_tol))?
    };
    if !total.value.is_finite() {
        return Err(VarError::Numeric("non-finite radial double integral".into()));
    }
    Ok(Integral {
        value: 2.0 * total.value,
        error: 2.0 * (total.error + inner_rel * total.value.abs()),
        evals: total.evals,
    })
}

/// `∫_0^1 g(r) dr` by adaptive quadrature with the given breakpoints.
pub(crate) fn integrate_unit<F: FnMut(f64) -> f64>(g: F, breaks: &[f64], rel: f64) -> Result<f64> {
    let mut pts = vec![0.0];
    pts.extend(breaks.iter().copied().filter(|b| *b > 0.0 && *b < 1.0));
    pts.push(1.0);
    value_of(integrate_breaks(g, &pts, Tolerance::new(0.0, rel)))
}

pub(crate) fn integrate_interval<F: FnMut(f64) -> f64>(g: F, a: f64, b: f64, rel: f64) -> Result<f64> {
    value_of(integrate(g, a, b, Tolerance::new(0.0, rel)))
}

pub(crate) fn integrate_to_inf_from<F: FnMut(f64) -> f64>(g: F, a: f64, rel: f64) -> Result<f64> {
    value_of(integrate_to_inf(g, a, Tolerance::new(0.0, rel)))
}
