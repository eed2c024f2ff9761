use psdpp_quad::{integrate, integrate_breaks, Tolerance};

use crate::{GeomError, Result};

const VOLUME_TOL: Tolerance = Tolerance::new(1e-12, 1e-13);

/// `e^{-dr} μ(B(o, r))`, bounded by `4^{-d}`.
///
/// Uses the polar-coordinate integrand rewritten as
/// `(d/4^d) ∫_0^r e^{-dy} (1 - e^{-(r-y)})^{2d-1} (1 + e^{-(r-y)}) dy`, which
/// never overflows.
pub fn ball_volume_scaled(r: f64, d: usize) -> f64 {
    assert!(d >= 1, "dimension must be at least 1");
    if r <= 0.0 {
        return 0.0;
    }
    if d == 1 {
        let e = -(-r).exp_m1();
        return 0.25 * e * e;
    }
    let df = d as f64;
    let pref = df / 4f64.powi(d as i32);
    let f = |y: f64| {
        let e = (-(r - y)).exp();
        (-df * y).exp() * (-(-(r - y)).exp_m1()).powi(2 * d as i32 - 1) * (1.0 + e)
    };
    // Beyond y = 60 the factor e^{-dy} is below 1e-52.
    let top = r.min(60.0);
    let v = integrate(f, 0.0, top, VOLUME_TOL).map(|i| i.value).unwrap_or_else(|e| match e {
        psdpp_quad::QuadError::NotConverged { value, .. } => value,
        _ => f64::NAN,
    });
    pref * v
}

/// Invariant volume `μ(B(o, r))` of a hyperbolic ball.
///
/// `d = 1` is the closed form `(cosh r - 1)/2`; larger `d` use adaptive
/// quadrature of the polar-coordinate integral.
pub fn ball_volume(r: f64, d: usize) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    if d == 1 {
        let h = (0.5 * r).sinh();
        return h * h;
    }
    ball_volume_scaled(r, d) * (d as f64 * r).exp()
}

/// Closed form `g_P(s) = 1/(4(s-1)) - 1/(4(s+1))` of the disk Poincaré mass.
pub fn poincare_mass_disk(s: f64) -> f64 {
    0.5 / ((s - 1.0) * (s + 1.0))
}

/// `g_P(s) = ∫ e^{-s d_B(x, o)} dμ(x)` for `s > d`.
///
/// For `d ≥ 2` the representation `s ∫ e^{-sr} μ(B(o,r)) dr` is evaluated
/// after the substitution `t = (s - d) r`, which keeps the integrand bounded
/// as `s ↓ d`.
pub fn poincare_mass(s: f64, d: usize) -> Result<f64> {
    if d == 0 {
        return Err(GeomError::Argument("dimension must be at least 1".into()));
    }
    let df = d as f64;
    if !(s > df) {
        return Err(GeomError::Argument(format!(
            "Poincaré mass requires s > d (got s = {s}, d = {d})"
        )));
    }
    if d == 1 {
        return Ok(poincare_mass_disk(s));
    }
    let eps = s - df;
    // The integrand e^{-t} κ(t/ε) switches on where t ~ ε; geometric
    // breakpoints let the adaptive rule see that layer.
    let mut breaks = vec![0.0];
    let mut b = 0.05 * eps;
    while b < 60.0 {
        breaks.push(b);
        b *= 4.0;
    }
    breaks.push(60.0);
    let v = integrate_breaks(
        |t: f64| (-t).exp() * ball_volume_scaled(t / eps, d),
        &breaks,
        Tolerance::new(1e-14, 1e-12),
    )
    .map_err(|e| GeomError::Argument(e.to_string()))?;
    Ok(s / eps * v.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_volume_closed_form() {
        assert!((ball_volume(2.0, 1) - 1.381_097_845_541_816_7).abs() < 1e-14);
        assert!((ball_volume_scaled(20.0, 1) - 0.25).abs() < 1e-8);
        assert_eq!(ball_volume(0.0, 3), 0.0);
    }

    #[test]
    fn mass_domain() {
        assert!(poincare_mass(1.0, 1).is_err());
        assert!(poincare_mass(2.0, 2).is_err());
        assert!((poincare_mass(2.0, 1).unwrap() - 1.0 / 6.0).abs() < 1e-16);
    }
}
