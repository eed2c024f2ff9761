use std::fmt;
use std::sync::Arc;

/// A radial function on the ball, `x ↦ Φ(|x|)`.
///
/// Profiles are stored as functions of the hyperbolic radius
/// `t = d_B(o, x) = 2 atanh|x|`, which is the natural variable for the
/// compactly supported interpolation profiles. `breaks` lists the radii where
/// the profile or its first derivative jumps so that quadrature can split
/// there.
#[derive(Clone)]
pub struct RadialProfile {
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    support: f64,
    breaks: Vec<f64>,
    integrable: bool,
    label: String,
}

impl fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialProfile")
            .field("label", &self.label)
            .field("support", &self.support)
            .field("breaks", &self.breaks)
            .finish()
    }
}

impl RadialProfile {
    /// Profile given by a function of the hyperbolic radius.
    ///
    /// `support` is the hyperbolic radius beyond which the profile vanishes
    /// (`f64::INFINITY` for full support).
    pub fn hyperbolic<F>(label: impl Into<String>, f: F, support: f64, breaks: Vec<f64>) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let mut breaks: Vec<f64> = breaks.into_iter().filter(|b| *b > 0.0 && b.is_finite()).collect();
        if support.is_finite() && !breaks.contains(&support) {
            breaks.push(support);
        }
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        RadialProfile {
            f: Arc::new(f),
            support,
            breaks,
            integrable: support.is_finite(),
            label: label.into(),
        }
    }

    /// Profile given by a function of the Euclidean radius `r ∈ [0, 1)`.
    pub fn euclidean<F>(label: impl Into<String>, f: F, support_bound: f64) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let support = if support_bound >= 1.0 {
            f64::INFINITY
        } else {
            2.0 * support_bound.atanh()
        };
        Self::hyperbolic(label, move |t: f64| f((0.5 * t).tanh()), support, vec![])
    }

    /// `1` on `B(o, r)` and `0` outside.
    pub fn indicator(r: f64) -> Self {
        Self::hyperbolic(format!("indicator({r})"), move |t| if t < r { 1.0 } else { 0.0 }, r, vec![])
    }

    /// C² hat `(1 - (t/r)²)³` supported in `B(o, r)`.
    pub fn bump(r: f64) -> Self {
        Self::hyperbolic(
            format!("bump({r})"),
            move |t| {
                if t >= r {
                    0.0
                } else {
                    let q = 1.0 - (t / r) * (t / r);
                    q * q * q
                }
            },
            r,
            vec![],
        )
    }

    /// `e^{-s t} = ((1-|x|)/(1+|x|))^s`, the Poincaré-series weight.
    pub fn exponential(s: f64) -> Self {
        Self::hyperbolic(format!("exp(-{s}d)"), move |t| (-s * t).exp(), f64::INFINITY, vec![])
    }

    /// `e^{-s t}` cut off at hyperbolic radius `r`.
    pub fn truncated_exponential(s: f64, r: f64) -> Self {
        Self::hyperbolic(
            format!("exp(-{s}d)<{r}"),
            move |t| if t < r { (-s * t).exp() } else { 0.0 },
            r,
            vec![],
        )
    }

    pub fn constant(c: f64) -> Self {
        Self::hyperbolic(format!("const({c})"), move |_| c, f64::INFINITY, vec![])
    }

    /// Marks a full-support profile as integrable against the invariant
    /// measure.
    pub fn with_integrable(mut self, integrable: bool) -> Self {
        self.integrable = integrable;
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `Φ(r)` for Euclidean radius `r`.
    pub fn evaluate(&self, r: f64) -> f64 {
        self.eval_hyperbolic(2.0 * r.atanh())
    }

    /// Value at hyperbolic radius `t`.
    pub fn eval_hyperbolic(&self, t: f64) -> f64 {
        if t >= self.support {
            return 0.0;
        }
        (self.f)(t)
    }

    /// Smallest Euclidean `ρ` with `Φ ≡ 0` on `(ρ, 1)`, or `1`.
    pub fn support_bound(&self) -> f64 {
        if self.support.is_finite() {
            (0.5 * self.support).tanh()
        } else {
            1.0
        }
    }

    /// Hyperbolic support radius (`∞` for full support).
    pub fn support_radius(&self) -> f64 {
        self.support
    }

    pub fn is_compact(&self) -> bool {
        self.support.is_finite()
    }

    pub fn integrable_flag(&self) -> bool {
        self.integrable
    }

    /// Hyperbolic radii of discontinuities, including the support edge.
    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indicator_and_bump() {
        let p = RadialProfile::indicator(2.0);
        assert_eq!(p.eval_hyperbolic(1.9), 1.0);
        assert_eq!(p.eval_hyperbolic(2.0), 0.0);
        assert!((p.support_bound() - 1f64.tanh()).abs() < 1e-15);
        assert_eq!(p.breaks(), &[2.0]);
        let b = RadialProfile::bump(3.0);
        assert_eq!(b.eval_hyperbolic(0.0), 1.0);
        assert_eq!(b.eval_hyperbolic(3.5), 0.0);
    }

    #[test]
    fn exponential_matches_euclidean_form() {
        let p = RadialProfile::exponential(1.5);
        let r = 0.6f64;
        assert!((p.evaluate(r) - ((1.0 - r) / (1.0 + r)).powf(1.5)).abs() < 1e-14);
        assert!(!p.is_compact());
    }
}
