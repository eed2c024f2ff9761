use statrs::function::beta::ln_beta;

use crate::radial::{integrate_interval, integrate_unit};
use crate::{Result, VarError};

const REL_TOL: f64 = 1e-12;

/// The pair of radial moments compared in the lower bound for the critical
/// weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClaimA {
    /// `(∫_0^1 ((1-r)/(1+r))^s r^{2n+1} dr)²`.
    pub u: f64,
    /// `(2n+2)^{-1} ∫_0^1 ((1-r)/(1+r))^{2s} r^{2n+1} dr`.
    pub v: f64,
    pub ratio: f64,
}

/// `U(n, s)`, `V(n, s)` and `U/V`. Cauchy–Schwarz gives `U < V`.
pub fn claim_a_uv(n: u64, s: f64) -> Result<ClaimA> {
    if !(1.0..=2.0).contains(&s) {
        return Err(VarError::Domain(format!("s = {s} outside [1, 2]")));
    }
    let p = 2.0 * n as f64 + 1.0;
    // mass of r^{2n+1} sits within 1/(n+1) of the boundary
    let w = 1.0 / (n as f64 + 1.0);
    let breaks: Vec<f64> = [0.5, 1.0 - 8.0 * w, 1.0 - w, 1.0 - w / 8.0]
        .into_iter()
        .filter(|b| *b > 0.0)
        .collect();
    let moment = |e: f64| {
        integrate_unit(
            |r| {
                if r >= 1.0 {
                    0.0
                } else {
                    (e * ((1.0 - r) / (1.0 + r)).ln() + p * r.ln()).exp()
                }
            },
            &breaks,
            REL_TOL,
        )
    };
    let a = moment(s)?;
    let u = a * a;
    let v = moment(2.0 * s)? / (2.0 * n as f64 + 2.0);
    Ok(ClaimA { u, v, ratio: u / v })
}

/// `(1/128) ∫_0^1 Φ_N(√(1-t))² t^{-4} dt` with `Φ(r) = ((1-r)/(1+r))^s`
/// truncated to `d_B(o, r) ≤ N + 1`.
///
/// This is the lower bound for `Var g^{Φ_N}_X(z; F_D)`; any `s > 1` is
/// accepted so that the convergent side `s > 3/2` can be displayed.
pub fn sharp_functional(s: f64, n: u32) -> Result<f64> {
    if !(s > 1.0 && s.is_finite()) {
        return Err(VarError::Domain(format!("s = {s} must exceed 1")));
    }
    // t = e^{-w}: the cutoff d_B ≤ N+1 is t ≥ sech²((N+1)/2)
    let c = 0.5 * (n as f64 + 1.0);
    let w_max = 2.0 * c.cosh().ln();
    let g = |w: f64| {
        let r = (-(-w).exp_m1()).sqrt();
        // (1-r)/(1+r) = e^{-w}/(1+r)²
        (2.0 * s * (-w - 2.0 * r.ln_1p()) + 3.0 * w).exp()
    };
    Ok(integrate_interval(g, 0.0, w_max, REL_TOL)? / 128.0)
}

/// [`sharp_functional`] restricted to the divergent range `1 < s ≤ 3/2`.
pub fn sharp_divergence_bound(s: f64, n: u32) -> Result<f64> {
    if !(s > 1.0 && s <= 1.5) {
        return Err(VarError::Domain(format!("s = {s} outside (1, 3/2]")));
    }
    sharp_functional(s, n)
}

/// `Σ_{k≥1} k^d m^{2s-d} / (k+m)^{2s+1}` for `m = |n|`, the bound on the
/// normalised cross term of the pluriharmonic variance (constants dropped).
pub fn pluri_ratio_bound(n: u64, s: f64, d: usize) -> Result<f64> {
    let df = d as f64;
    if n == 0 {
        return Err(VarError::Domain("|n| must be at least 1".into()));
    }
    if !(s >= df && s <= 2.0 * df) {
        return Err(VarError::Domain(format!("s = {s} outside [{d}, {}]", 2 * d)));
    }
    let m = n as f64;
    let term = |k: f64| (df * (k / m).ln() - (2.0 * s + 1.0) * (1.0 + k / m).ln()).exp() / m;
    let k_max = 64 * n + 1000;
    let head: f64 = (1..=k_max).map(|k| term(k as f64)).sum();
    // midpoint rule for the tail of a decreasing summand
    let tail = crate::radial::integrate_to_inf_from(term, k_max as f64 + 0.5, REL_TOL)?;
    Ok(head + tail)
}

/// `B(d+1, 2s-d) = ∫_0^∞ t^d (1+t)^{-2s-1} dt`, the `|n| → ∞` limit of
/// [`pluri_ratio_bound`].
pub fn pluri_ratio_limit(s: f64, d: usize) -> f64 {
    let df = d as f64;
    ln_beta(df + 1.0, 2.0 * s - df).exp()
}

/// The Riemann sum `(1/m) Σ_{k≥1} H(k/m)`, `H(t) = t^d/(1+t)^{2d+1}`,
/// against `max H + 2∫H`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerSum {
    pub sum: f64,
    pub bound: f64,
}

pub fn pluri_inner_sum(d: usize, m: u64) -> Result<InnerSum> {
    if d == 0 || m == 0 {
        return Err(VarError::Argument("d and m must be positive".into()));
    }
    let df = d as f64;
    let h = |t: f64| (df * t.ln() - (2.0 * df + 1.0) * t.ln_1p()).exp();
    let mf = m as f64;
    let k_max = 64 * m + 1000;
    let head: f64 = (1..=k_max).map(|k| h(k as f64 / mf)).sum::<f64>() / mf;
    let tail = crate::radial::integrate_to_inf_from(h, (k_max as f64 + 0.5) / mf, REL_TOL)?;
    let t0 = df / (df + 1.0);
    let bound = h(t0) + 2.0 * ln_beta(df + 1.0, df).exp();
    Ok(InnerSum { sum: head + tail, bound })
}
