use std::f64::consts::PI;

use psdpp_hypgeom::disk::mobius;
use psdpp_hypgeom::{Point, C64};
use psdpp_kernels::RadialProfile;

use crate::radial::{eps_u, rho_of_v, symmetric_pair_integral, Radial};
use crate::{Result, VarError, VarianceReport};

const REL_TOL: f64 = 1e-10;
const JZ_NODES: usize = 256;

/// `I_z = 1 + (3+8a)u + (3a²+8a)u² + a²u³` with `a = |z|²`, `u = |xy|²`.
pub fn iz_polynomial(u: f64, a: f64) -> f64 {
    1.0 + u * ((3.0 + 8.0 * a) + u * ((3.0 * a * a + 8.0 * a) + u * a * a))
}

fn check_profile(r: &RadialProfile, z: &Point) -> Result<f64> {
    if z.dim() != 1 {
        return Err(VarError::Argument("the I_z identity is stated on the disk".into()));
    }
    if !r.is_compact() {
        return Err(VarError::Contract(format!("profile {} is not compactly supported", r.label())));
    }
    Ok(z.norm_sqr())
}

/// `Var g^R_X(z; F_D)` for `F_D(x) = K_D(·, x)`, by the closed-form angular
/// kernel:
/// `(2(1-|z|²)²)^{-1} ∬ |R(x) - R(y)|² (1-|xy|²)^{-5} I_z(x, y) dA dA`.
pub fn identity_iz(r: &RadialProfile, z: &Point) -> Result<VarianceReport> {
    let a = check_profile(r, z)?;
    let ln_pre = -2.0 * (-a).ln_1p();
    iz_integral(r, z, "closed", |ln_eps, u| (iz_polynomial(u, a).ln() + ln_pre - 5.0 * ln_eps).exp())
}

/// The same variance with the angular kernel from quadrature instead of the
/// residue formula.
///
/// The θ₁-average at fixed `θ₁ + θ₂ = ψ` of the numerator of `J_z` is the
/// polynomial `1 + 4|z|²vω + |z|⁴v²ω²` (`ω = e^{iψ}`, `v = |xy|`), so
/// `J_z = (1-|z|²)^{-2} ⟨(1 + 4|z|²vω + |z|⁴v²ω²)(1-vω)^{-4}(1-vω̄)^{-2}⟩_ψ`,
/// evaluated by the trapezoid rule with `40/(1-v)` nodes.
pub fn identity_iz_angular(r: &RadialProfile, z: &Point) -> Result<VarianceReport> {
    let a = check_profile(r, z)?;
    let pre = 1.0 / ((1.0 - a) * (1.0 - a));
    iz_integral(r, z, "angular", |_, u| pre * psi_average(u.sqrt(), a))
}

fn psi_average(v: f64, a: f64) -> f64 {
    let n = ((40.0 / (1.0 - v)).ceil() as usize).max(32);
    let mut sum = 0.0;
    for j in 0..n {
        let w = C64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64);
        let one = C64::new(1.0, 0.0);
        let num = one + w * (4.0 * a * v) + w * w * (a * a * v * v);
        let p = one - w * v;
        let q = one - w.conj() * v;
        sum += (num / (p * p * p * p * q * q)).re;
    }
    sum / n as f64
}

fn iz_integral<K>(r: &RadialProfile, z: &Point, route: &str, kernel: K) -> Result<VarianceReport>
where
    K: Fn(f64, f64) -> f64,
{
    let w = Radial::Profile(r.clone());
    let f = |v1: f64, v2: f64| {
        let d = r.eval_hyperbolic(rho_of_v(v1)) - r.eval_hyperbolic(rho_of_v(v2));
        if d == 0.0 {
            return 0.0;
        }
        let (ln_eps, u) = eps_u(v1, v2);
        0.5 * d * d * kernel(ln_eps, u) * (-v1 - v2).exp()
    };
    let i = symmetric_pair_integral(f, &w.v_breaks(), w.v_support(), f64::INFINITY, REL_TOL)?;
    Ok(
        VarianceReport::quadrature(format!("gR[{};F_D]", r.label()), i.value, i.error)
            .with_meta("z", z.norm())
            .with_meta("route", route),
    )
}

/// `(trapezoid, closed form)` for
/// `J_z(x,y) = ∬ K_D(φ_z(xe^{iθ₁}), φ_z(ye^{-iθ₂})) |K_D(xe^{iθ₁}, ye^{-iθ₂})|² dθ₁dθ₂/4π²`.
///
/// The trapezoid uses `256 × 256` nodes on the integrand as defined, with the
/// Möbius maps applied numerically.
pub fn residue_jz_check(x: f64, y: f64, z: &Point) -> Result<(f64, f64)> {
    if !((0.0..1.0).contains(&x) && (0.0..1.0).contains(&y)) {
        return Err(VarError::Argument(format!("radii ({x}, {y}) must lie in [0, 1)")));
    }
    if z.dim() != 1 {
        return Err(VarError::Argument("J_z is defined on the disk".into()));
    }
    let zc = z.coords()[0];
    let one = C64::new(1.0, 0.0);
    let k = |p: C64, q: C64| {
        let w = one - p * q.conj();
        one / (w * w)
    };
    let n = JZ_NODES;
    let mut sum = C64::new(0.0, 0.0);
    for i in 0..n {
        let p = C64::from_polar(x, 2.0 * PI * i as f64 / n as f64);
        let pz = mobius(zc, p);
        for j in 0..n {
            let q = C64::from_polar(y, -2.0 * PI * j as f64 / n as f64);
            sum += k(pz, mobius(zc, q)) * k(p, q).norm_sqr();
        }
    }
    let quad = sum.re / (n * n) as f64;
    let a = z.norm_sqr();
    let u = x * x * y * y;
    let closed = iz_polynomial(u, a) / ((1.0 - a) * (1.0 - a) * (1.0 - u).powi(5));
    Ok((quad, closed))
}

/// `Var g^R_X(z; F_D) / (g^R_P)²`, the mean squared uniform interpolation
/// error over the unit ball of `A²(D)`.
pub fn impossibility_ratio(r: &RadialProfile, z: &Point) -> Result<f64> {
    let var = identity_iz(r, z)?;
    let mass = Radial::Profile(r.clone()).mass()?;
    if !(mass > 0.0) {
        return Err(VarError::Domain(format!("profile {} has zero mass", r.label())));
    }
    Ok(var.value / (mass * mass))
}
