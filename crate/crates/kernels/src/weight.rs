use psdpp_quad::{integrate, integrate_breaks, QuadError, Tolerance};
use statrs::function::gamma::ln_gamma;

use crate::{KernelError, RadialProfile, Result};

const MOMENT_TOL: Tolerance = Tolerance::new(1e-300, 1e-12);

#[derive(Debug, Clone)]
pub enum WeightKind {
    /// `W ≡ 1`.
    Unit,
    /// `(1 - |z|²)^α`, `α > -1`.
    StandardAlpha(f64),
    /// `(1 - |z|²)^{-1} log^{-2}(4/(1 - |z|²))`.
    Critical,
    /// `(1 - |z|²)^{-1} log^{-2+γ}(4/(1 - |z|²))`, `γ ∈ (0, 1)`.
    LogSupercritical(f64),
    /// `W(z) = Φ(|z|)`.
    Custom(RadialProfile),
}

/// A radial weight on `D_d`.
#[derive(Debug, Clone)]
pub struct WeightSpec {
    pub kind: WeightKind,
    pub d: usize,
}

impl WeightSpec {
    pub fn new(kind: WeightKind, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(KernelError::Argument("dimension must be at least 1".into()));
        }
        match &kind {
            WeightKind::StandardAlpha(a) if !(*a > -1.0) => {
                return Err(KernelError::Admissibility(format!("(1-|z|²)^α needs α > -1, got {a}")))
            }
            WeightKind::LogSupercritical(g) if !(*g > 0.0 && *g < 1.0) => {
                return Err(KernelError::Admissibility(format!(
                    "log-supercritical weight needs γ ∈ (0, 1), got {g}"
                )))
            }
            WeightKind::Custom(p) if !p.is_compact() && !p.integrable_flag() => {
                return Err(KernelError::Admissibility(format!(
                    "profile {} is not marked integrable",
                    p.label()
                )))
            }
            _ => {}
        }
        Ok(WeightSpec { kind, d })
    }

    pub fn unit(d: usize) -> Self {
        WeightSpec { kind: WeightKind::Unit, d }
    }

    pub fn critical(d: usize) -> Self {
        WeightSpec {
            kind: WeightKind::Critical,
            d,
        }
    }

    pub fn supercritical(gamma: f64, d: usize) -> Result<Self> {
        Self::new(WeightKind::LogSupercritical(gamma), d)
    }

    /// Identifier used in coefficient tables.
    pub fn id(&self) -> String {
        match &self.kind {
            WeightKind::Unit => "unit".into(),
            WeightKind::StandardAlpha(a) => format!("standard_alpha({a})"),
            WeightKind::Critical => "critical".into(),
            WeightKind::LogSupercritical(g) => format!("log_supercritical({g})"),
            WeightKind::Custom(p) => format!("custom:{}", p.label()),
        }
    }

    /// Inverse of [`WeightSpec::id`] for the built-in kinds.
    pub fn from_id(id: &str, d: usize) -> Option<Self> {
        let arg = |prefix: &str| -> Option<f64> {
            id.strip_prefix(prefix)?.strip_suffix(')')?.parse().ok()
        };
        let kind = match id {
            "unit" => WeightKind::Unit,
            "critical" => WeightKind::Critical,
            _ => {
                if let Some(a) = arg("standard_alpha(") {
                    WeightKind::StandardAlpha(a)
                } else {
                    WeightKind::LogSupercritical(arg("log_supercritical(")?)
                }
            }
        };
        WeightSpec::new(kind, d).ok()
    }

    /// `W` as a function of `t = |z|²`.
    pub fn eval_sq(&self, t: f64) -> f64 {
        let log_type = |g: f64| {
            let x = (4.0 / (1.0 - t)).ln();
            x.powf(g - 2.0) / (1.0 - t)
        };
        match &self.kind {
            WeightKind::Unit => 1.0,
            WeightKind::StandardAlpha(a) => (1.0 - t).powf(*a),
            WeightKind::Critical => log_type(0.0),
            WeightKind::LogSupercritical(g) => log_type(*g),
            WeightKind::Custom(p) => p.evaluate(t.sqrt()),
        }
    }

    /// `m_μ = ∫_0^1 t^μ W(√t) dt` for real `μ ≥ 0`.
    ///
    /// The kernel coefficients are `a_n = C(n+d-1, n) / (d · m_{n+d-1})`.
    pub fn moment(&self, mu: f64) -> Result<f64> {
        match &self.kind {
            WeightKind::Unit => Ok(1.0 / (mu + 1.0)),
            WeightKind::StandardAlpha(a) => {
                Ok((ln_gamma(mu + 1.0) + ln_gamma(a + 1.0) - ln_gamma(mu + a + 2.0)).exp())
            }
            WeightKind::Critical => log_moment(mu, 0.0),
            WeightKind::LogSupercritical(g) => log_moment(mu, *g),
            WeightKind::Custom(p) => profile_moment(p, mu),
        }
    }

    /// Closed form of `ln m_μ` when one exists.
    pub(crate) fn ln_moment_closed(&self, mu: f64) -> Option<f64> {
        match &self.kind {
            WeightKind::Unit => Some(-(mu + 1.0).ln()),
            WeightKind::StandardAlpha(a) => {
                Some(ln_gamma(mu + 1.0) + ln_gamma(a + 1.0) - ln_gamma(mu + a + 2.0))
            }
            _ => None,
        }
    }
}

fn numeric(e: QuadError) -> KernelError {
    KernelError::Numeric(e.to_string())
}

/// `∫_{log 4}^∞ (1 - 4e^{-x})^ν x^{γ-2} dx`.
///
/// This is the moment of the log-type weights after `1 - t = 4e^{-x}`. The
/// factor `(1-4e^{-x})^ν` switches on around `x0 = log(4ν)`; the body is
/// integrated on `[x0 - 6, x0 + 40]` and the algebraic tail through
/// `x = X₁ v^{-q}`, `q = 1/(1-γ)`, which makes it a bounded integrand on
/// `(0, 1]`.
pub(crate) fn log_moment(nu: f64, gamma: f64) -> Result<f64> {
    let ln4 = 4f64.ln();
    let pow = |x: f64| {
        if nu == 0.0 {
            1.0
        } else {
            (nu * (-4.0 * (-x).exp()).ln_1p()).exp()
        }
    };
    let x0 = (4.0 * nu.max(1.0)).ln();
    let lo = ln4.max(x0 - 6.0);
    let x1 = x0 + 40.0;
    let mut breaks = vec![lo];
    if x0 > lo {
        breaks.push(x0);
    }
    breaks.push(x1);
    let body = integrate_breaks(|x| pow(x) * x.powf(gamma - 2.0), &breaks, MOMENT_TOL).map_err(numeric)?;
    let q = 1.0 / (1.0 - gamma);
    let pref = q * x1.powf(gamma - 1.0);
    let tail = integrate(
        |v: f64| if v <= 0.0 { pref } else { pref * pow(x1 * v.powf(-q)) },
        0.0,
        1.0,
        MOMENT_TOL,
    )
    .map_err(numeric)?;
    Ok(body.value + tail.value)
}

/// `∫_0^1 t^μ Φ(√t) dt = ∫_0^∞ e^{-(μ+1)y} Φ(e^{-y/2}) dy`.
fn profile_moment(p: &RadialProfile, mu: f64) -> Result<f64> {
    let k = mu + 1.0;
    // Profile jumps at hyperbolic radius b sit at y = -2 ln tanh(b/2).
    let mut breaks: Vec<f64> = p
        .breaks()
        .iter()
        .map(|&b| -2.0 * (0.5 * b).tanh().ln())
        .filter(|y| y.is_finite() && *y > 0.0)
        .collect();
    let mut y = 0.1 / k;
    while y < 800.0 / k {
        breaks.push(y);
        y *= 8.0;
    }
    breaks.push(0.0);
    breaks.push(800.0 / k);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let v = integrate_breaks(
        |y: f64| {
            let r = (-0.5 * y).exp();
            if r >= 1.0 {
                return 0.0;
            }
            (-k * y).exp() * p.evaluate(r)
        },
        &breaks,
        MOMENT_TOL,
    )
    .map_err(numeric)?;
    // Upper limit: mass beyond y = 800/k carries a factor e^{-800}.
    if !(v.value > 0.0) {
        return Err(KernelError::Admissibility(format!(
            "profile {} has zero moment of order {mu}",
            p.label()
        )));
    }
    Ok(v.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_moments() {
        let u = WeightSpec::unit(1);
        assert!((u.moment(3.0).unwrap() - 0.25).abs() < 1e-15);
        let a = WeightSpec::new(WeightKind::StandardAlpha(1.0), 1).unwrap();
        // ∫ t^2 (1-t) dt = 1/12
        assert!((a.moment(2.0).unwrap() - 1.0 / 12.0).abs() < 1e-14);
    }

    #[test]
    fn critical_zeroth_moment() {
        let m = log_moment(0.0, 0.0).unwrap();
        assert!((m - 1.0 / 4f64.ln()).abs() < 1e-12);
        // ∫_{log 4}^∞ x^{-3/2} dx = 2/sqrt(log 4)
        let m = log_moment(0.0, 0.5).unwrap();
        assert!((m - 2.0 / 4f64.ln().sqrt()).abs() < 1e-11);
    }

    #[test]
    fn ids_round_trip() {
        for w in [
            WeightSpec::unit(2),
            WeightSpec::critical(1),
            WeightSpec::supercritical(0.5, 1).unwrap(),
            WeightSpec::new(WeightKind::StandardAlpha(0.25), 3).unwrap(),
        ] {
            assert_eq!(WeightSpec::from_id(&w.id(), w.d).unwrap().id(), w.id());
        }
        assert!(WeightSpec::from_id("custom:x", 1).is_none());
    }

    #[test]
    fn admissibility() {
        assert!(WeightSpec::supercritical(1.0, 1).is_err());
        assert!(WeightSpec::new(WeightKind::StandardAlpha(-1.0), 1).is_err());
    }

    #[test]
    fn custom_profile_moment() {
        let w = WeightSpec::new(WeightKind::Custom(RadialProfile::constant(1.0).with_integrable(true)), 1).unwrap();
        assert!((w.moment(5.0).unwrap() - 1.0 / 6.0).abs() < 1e-12);
        let half = RadialProfile::euclidean("disk(0.5)", |r| if r < 0.5 { 1.0 } else { 0.0 }, 0.5);
        let w = WeightSpec::new(WeightKind::Custom(half), 1).unwrap();
        // ∫_0^{1/4} t dt = 1/32
        assert!((w.moment(1.0).unwrap() - 1.0 / 32.0).abs() < 1e-12);
    }
}
