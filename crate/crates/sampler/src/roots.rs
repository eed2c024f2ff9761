//! Simultaneous polynomial root finding by Aberth–Ehrlich iteration.

use psdpp_hypgeom::C64;

use crate::{Result, SamplerError};

const MAX_ITER: usize = 600;

/// `(p(z), p'(z))` for `p(z) = Σ c_n z^n`.
///
/// For `|z| > 1` the reversed polynomial is evaluated at `1/z` so Horner's
/// rule never sees large powers; the returned pair is then rescaled.
fn eval_ratio(c: &[C64], z: C64) -> C64 {
    let n = c.len() - 1;
    if z.norm_sqr() <= 1.0 {
        let (mut p, mut dp) = (c[n], C64::new(0.0, 0.0));
        for &a in c[..n].iter().rev() {
            dp = dp * z + p;
            p = p * z + a;
        }
        p / dp
    } else {
        // p(z) = z^n q(1/z), q(w) = Σ c_{n-k} w^k.
        let w = z.inv();
        let (mut q, mut dq) = (c[0], C64::new(0.0, 0.0));
        for &a in c[1..].iter() {
            dq = dq * w + q;
            q = q * w + a;
        }
        // p'/p = n/z - q'(w) w² / (z q(w)) ... written as p/p' below.
        let nf = n as f64;
        let dlog = (nf - dq * w / q) * w;
        dlog.inv()
    }
}

/// Horner value of `Σ c_n z^n`.
pub fn horner(c: &[C64], z: C64) -> C64 {
    c.iter().rev().fold(C64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

/// Horner value of the derivative.
pub fn horner_derivative(c: &[C64], z: C64) -> C64 {
    let n = c.len() - 1;
    let (mut p, mut dp) = (c[n], C64::new(0.0, 0.0));
    for &a in c[..n].iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    dp
}

/// Initial radii from the upper convex hull of `(n, log|c_n|)`.
fn newton_polygon_starts(c: &[C64]) -> Vec<C64> {
    let n = c.len() - 1;
    let pts: Vec<(f64, f64)> = c
        .iter()
        .enumerate()
        .map(|(i, a)| (i as f64, if a.norm() > 0.0 { a.norm().ln() } else { -1e30 }))
        .collect();
    let mut hull: Vec<usize> = Vec::new();
    for i in 0..=n {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (pts[b].0 - pts[a].0) * (pts[i].1 - pts[a].1) - (pts[b].1 - pts[a].1) * (pts[i].0 - pts[a].0);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    let mut out = Vec::with_capacity(n);
    for w in hull.windows(2) {
        let (i, j) = (w[0], w[1]);
        let m = j - i;
        let r = ((pts[i].1 - pts[j].1) / m as f64).exp();
        let offset = 0.7 + 0.3 * out.len() as f64;
        for k in 0..m {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / m as f64 + offset;
            out.push(C64::from_polar(r, theta));
        }
    }
    out
}

/// All roots of `Σ c_n z^n` (`c_N ≠ 0`).
pub fn aberth_roots(c: &[C64]) -> Result<Vec<C64>> {
    let n = c.len() - 1;
    if n == 0 {
        return Ok(vec![]);
    }
    if c[n].norm() == 0.0 {
        return Err(SamplerError::Numeric("leading coefficient vanishes".into()));
    }
    let mut z = newton_polygon_starts(c);
    let mut done = vec![false; n];
    let mut last = vec![f64::INFINITY; n];
    let mut jitters = 0usize;
    for _ in 0..MAX_ITER {
        let mut all = true;
        for k in 0..n {
            if done[k] {
                continue;
            }
            let ratio = eval_ratio(c, z[k]);
            let mut s = C64::new(0.0, 0.0);
            for j in 0..n {
                if j != k {
                    s += (z[k] - z[j]).inv();
                }
            }
            let step = ratio / (C64::new(1.0, 0.0) - ratio * s);
            if !step.re.is_finite() || !step.im.is_finite() {
                // A critical point of p or a collision with another iterate: nudge off it.
                jitters += 1;
                if jitters > 10 * n {
                    return Err(SamplerError::Numeric("Aberth iterates keep hitting singular points".into()));
                }
                z[k] *= C64::from_polar(1.0 + 1e-7, 0.1 + 1e-3 * jitters as f64);
                all = false;
                continue;
            }
            z[k] -= step;
            last[k] = step.norm() / z[k].norm().max(1e-300);
            if last[k] <= 1e-14 {
                done[k] = true;
            } else {
                all = false;
            }
        }
        if all {
            return Ok(z);
        }
    }
    // Roundoff can keep a few corrections just above the threshold.
    let worst = last.iter().cloned().fold(0.0, f64::max);
    if worst < 1e-10 {
        return Ok(z);
    }
    Err(SamplerError::Numeric(format!(
        "Aberth iteration did not converge for degree {n} (relative step {worst:e})"
    )))
}

/// Newton steps on a single root until the update stalls.
pub fn polish(c: &[C64], mut z: C64) -> C64 {
    for _ in 0..8 {
        let step = eval_ratio(c, z);
        if !step.re.is_finite() || !step.im.is_finite() {
            break;
        }
        z -= step;
        if step.norm() <= 4.0 * f64::EPSILON * z.norm() {
            break;
        }
    }
    z
}
