//! Allocation-free `d = 1` versions of the geometric primitives.

use crate::C64;

/// `φ_w(z) = (w - z)/(1 - z·w̄)`.
#[inline]
pub fn mobius(w: C64, z: C64) -> C64 {
    (w - z) / (C64::new(1.0, 0.0) - z * w.conj())
}

/// `1 - |φ_z(x)|²` without cancellation.
#[inline]
pub fn one_minus_mobius_norm_sqr(x: C64, z: C64) -> f64 {
    let d = (C64::new(1.0, 0.0) - x * z.conj()).norm_sqr();
    (1.0 - z.norm_sqr()) * (1.0 - x.norm_sqr()) / d
}

/// Bergman distance on the disk.
#[inline]
pub fn distance(x: C64, z: C64) -> f64 {
    let q = one_minus_mobius_norm_sqr(x, z);
    if q > 0.5 {
        2.0 * mobius(z, x).norm().atanh()
    } else {
        let p = (1.0 - q).sqrt();
        ((1.0 + p) * (1.0 + p) / q).ln()
    }
}

/// Euclidean radius of the hyperbolic ball `B(o, r)`.
#[inline]
pub fn euclidean_radius(r: f64) -> f64 {
    (0.5 * r).tanh()
}

/// Hyperbolic distance from the origin of a point at Euclidean radius `rho`.
#[inline]
pub fn hyperbolic_radius(rho: f64) -> f64 {
    2.0 * rho.atanh()
}

/// `1 - tanh²(t/2)`, exact for large `t`.
#[inline]
pub fn one_minus_r2(t: f64) -> f64 {
    let e = (-t).exp();
    4.0 * e / ((1.0 + e) * (1.0 + e))
}

/// `ln(1 - tanh²(t/2))`, finite for every `t ≥ 0`.
#[inline]
pub fn ln_one_minus_r2(t: f64) -> f64 {
    4.0f64.ln() - t - 2.0 * (-t).exp().ln_1p()
}
