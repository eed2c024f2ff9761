use psdpp_hypgeom::{Point, C64};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use crate::{stream, window_rho, Configuration, Generator, Result, SamplerError, TruncationMeta};

const MAX_PROPOSALS_PER_POINT: u64 = 50_000_000;
const RETRIES: u32 = 3;
const MISSING_MASS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HkpvMode {
    /// Projection onto all normalised monomials of degree `≤ N` on the whole
    /// ball, restricted to the window afterwards.
    Truncated,
    /// The restriction of the full process to the window: the eigenfunction
    /// of degree `n` is kept with probability `ρ^{2(n+d)}`.
    Window,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HkpvSpec {
    pub d: usize,
    /// `None` picks the default for the mode.
    pub degree_cutoff: Option<usize>,
    pub window_radius: f64,
    pub mode: HkpvMode,
}

impl HkpvSpec {
    pub fn new(d: usize, window_radius: f64, mode: HkpvMode) -> Self {
        HkpvSpec {
            d,
            degree_cutoff: None,
            window_radius,
            mode,
        }
    }
}

/// Smallest `N` with `Σ_{|α|≤N} |φ_α(z)|² ≥ (1 - 1e-6) K(z, z)` at
/// `|z| = tanh(R/2)`.
pub fn default_degree_cutoff(d: usize, window_radius: f64) -> Result<usize> {
    let rho = window_rho(window_radius)?;
    let t = rho * rho;
    // K(z,z) = (1-t)^{-(d+1)} = Σ_n C(n+d, d) t^n
    let total = (-(d as f64 + 1.0) * (-t).ln_1p()).exp();
    let mut partial = 0.0;
    let mut term = 1.0;
    for n in 0..10_000_000usize {
        partial += term;
        if partial >= (1.0 - 1e-6) * total {
            return Ok(n);
        }
        term *= t * (n + 1 + d) as f64 / (n + 1) as f64;
    }
    Err(SamplerError::Argument(format!("window radius {window_radius} needs an impractical cutoff")))
}

/// Multi-indices of total degree `n` in `d` variables.
fn multi_indices(n: usize, d: usize) -> Vec<Vec<u32>> {
    if d == 1 {
        return vec![vec![n as u32]];
    }
    let mut out = Vec::new();
    for first in (0..=n).rev() {
        for mut rest in multi_indices(n - first, d - 1) {
            rest.insert(0, first as u32);
            out.push(rest);
        }
    }
    out
}

struct Basis {
    alphas: Vec<Vec<u32>>,
    /// `½ ln((|α|+d)!/(d! α!))`
    half_ln_norm: Vec<f64>,
    degree: Vec<usize>,
}

impl Basis {
    fn new(alphas: Vec<Vec<u32>>, d: usize) -> Self {
        let top = alphas.iter().map(|a| a.iter().sum::<u32>() as usize).max().unwrap_or(0) + d;
        let mut lnf = vec![0.0f64; top + 1];
        for k in 1..=top {
            lnf[k] = lnf[k - 1] + (k as f64).ln();
        }
        let degree: Vec<usize> = alphas.iter().map(|a| a.iter().sum::<u32>() as usize).collect();
        let half_ln_norm = alphas
            .iter()
            .zip(&degree)
            .map(|(a, &n)| 0.5 * (lnf[n + d] - lnf[d] - a.iter().map(|&k| lnf[k as usize]).sum::<f64>()))
            .collect();
        Basis {
            alphas,
            half_ln_norm,
            degree,
        }
    }

    fn len(&self) -> usize {
        self.alphas.len()
    }

    /// `ψ_α(w)` up to the common factor `r0^{-d}`, where `w = z / r0`.
    fn eval(&self, w: &[C64], out: &mut [C64]) {
        let ln_abs: Vec<f64> = w.iter().map(|c| c.norm().ln()).collect();
        let arg: Vec<f64> = w.iter().map(|c| c.arg()).collect();
        for (j, a) in self.alphas.iter().enumerate() {
            let mut lm = self.half_ln_norm[j];
            let mut ph = 0.0;
            for (i, &k) in a.iter().enumerate() {
                if k > 0 {
                    lm += k as f64 * ln_abs[i];
                    ph += k as f64 * arg[i];
                }
            }
            out[j] = C64::from_polar(lm.exp(), ph);
        }
    }
}

/// Draw from `|ψ_α|² dV` on the ball of radius `r0`.
fn propose(alpha: &[u32], r0: f64, rng: &mut ChaCha8Rng) -> Result<Vec<C64>> {
    let d = alpha.len();
    let n: u32 = alpha.iter().sum();
    let u: f64 = rng.random();
    let r = r0 * u.powf(1.0 / (2 * n as usize + 2 * d) as f64);
    let mut g = Vec::with_capacity(d);
    for &k in alpha {
        let dist = Gamma::new(k as f64 + 1.0, 1.0).map_err(|e| SamplerError::Numeric(e.to_string()))?;
        g.push(dist.sample(rng));
    }
    let s: f64 = g.iter().sum();
    Ok(g.iter()
        .map(|&gi| {
            let theta: f64 = 2.0 * std::f64::consts::PI * rng.random::<f64>();
            C64::from_polar(r * (gi / s).sqrt(), theta)
        })
        .collect())
}

/// Sequential sampler for the projection process spanned by `basis` on
/// the ball of radius `r0`.
///
/// Points are drawn by rejection from the mixture `(1/M) Σ |ψ_α|²` and
/// accepted with probability `‖E* u‖² / ‖u‖²`, where the columns of `E`
/// span the remaining subspace and `u = conj(ψ(x))`. After each point the
/// direction `E E* u` is removed with a Householder reflection.
fn project_sample(basis: &Basis, r0: f64, rng: &mut ChaCha8Rng) -> Result<(Vec<Vec<C64>>, u64)> {
    let m = basis.len();
    let d = basis.alphas.first().map_or(1, |a| a.len());
    let zero = C64::new(0.0, 0.0);
    // Columns of E stored contiguously; starts as the identity.
    let mut e: Vec<Vec<C64>> = (0..m)
        .map(|j| {
            let mut c = vec![zero; m];
            c[j] = C64::new(1.0, 0.0);
            c
        })
        .collect();
    let mut u = vec![zero; m];
    let mut y = vec![zero; m];
    let mut points = Vec::with_capacity(m);
    let mut rejected = 0u64;
    let mut w = vec![zero; d];
    for k in (1..=m).rev() {
        let mut tries = 0u64;
        loop {
            tries += 1;
            if tries > MAX_PROPOSALS_PER_POINT {
                return Err(SamplerError::Numeric(format!(
                    "no acceptance after {MAX_PROPOSALS_PER_POINT} proposals with {k} points left"
                )));
            }
            let j = rng.random_range(0..m);
            let x = propose(&basis.alphas[j], r0, rng)?;
            for (wi, xi) in w.iter_mut().zip(&x) {
                *wi = xi / r0;
            }
            basis.eval(&w, &mut u);
            for v in u.iter_mut() {
                *v = v.conj();
            }
            let norm_u: f64 = u.iter().map(|c| c.norm_sqr()).sum();
            let mut proj = 0.0;
            for (yi, col) in y.iter_mut().zip(&e) {
                *yi = col.iter().zip(&u).map(|(a, b)| a.conj() * b).sum();
                proj += yi.norm_sqr();
            }
            let ratio = proj / norm_u;
            if ratio < -1e-12 || !ratio.is_finite() {
                return Err(SamplerError::Numeric(format!("conditional density {ratio:e} is negative")));
            }
            if rng.random::<f64>() * norm_u < proj {
                points.push(x);
                break;
            }
            rejected += 1;
        }
        if k == 1 {
            break;
        }
        // Householder H with H y = α e_0; the new basis is E H minus its first column.
        let y = &y[..k];
        let ny = y.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let phase = if y[0].norm() > 0.0 { y[0] / y[0].norm() } else { C64::new(1.0, 0.0) };
        let mut v = y.to_vec();
        v[0] += phase * ny;
        let nv2: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        let beta = 2.0 / nv2;
        let mut ev = vec![zero; m];
        for (col, vi) in e.iter().zip(&v) {
            for (acc, a) in ev.iter_mut().zip(col) {
                *acc += a * vi;
            }
        }
        for (col, vi) in e.iter_mut().zip(&v) {
            let f = beta * vi.conj();
            for (a, b) in col.iter_mut().zip(&ev) {
                *a -= b * f;
            }
        }
        e.swap_remove(0);
    }
    Ok((points, rejected))
}

/// One configuration of the projection sampler.
///
/// In [`HkpvMode::Truncated`] the sampler places exactly `#{α : |α| ≤ N}`
/// points in the ball and keeps those inside `B(o, R)`. In
/// [`HkpvMode::Window`] every kept eigenfunction contributes one point of
/// the window.
pub fn sample_hkpv(spec: &HkpvSpec, seed: u64) -> Result<Configuration> {
    if spec.d == 0 {
        return Err(SamplerError::Argument("dimension must be at least 1".into()));
    }
    let rho = window_rho(spec.window_radius)?;
    let d = spec.d;
    let mut last = String::new();
    for attempt in 0..=RETRIES as u64 {
        let mut rng = stream(seed, attempt);
        let (alphas, r0, missing) = match spec.mode {
            HkpvMode::Truncated => {
                let n = match spec.degree_cutoff {
                    Some(n) => n,
                    None => default_degree_cutoff(d, spec.window_radius)?,
                };
                let alphas: Vec<Vec<u32>> = (0..=n).flat_map(|k| multi_indices(k, d)).collect();
                (alphas, 1.0, truncated_missing(d, rho, n))
            }
            HkpvMode::Window => {
                let n = match spec.degree_cutoff {
                    Some(n) => n,
                    None => window_degree_cutoff(d, rho),
                };
                let mut alphas = Vec::new();
                let ln_rho2 = 2.0 * rho.ln();
                for k in 0..=n {
                    let p = ((k + d) as f64 * ln_rho2).exp();
                    for a in multi_indices(k, d) {
                        if rng.random::<f64>() < p {
                            alphas.push(a);
                        }
                    }
                }
                (alphas, rho, window_missing(d, rho, n))
            }
        };
        let basis = Basis::new(alphas, d);
        match project_sample(&basis, r0, &mut rng) {
            Ok((raw, rejected)) => {
                let total = raw.len() as u64;
                let r2 = rho * rho;
                let points = raw
                    .into_iter()
                    .filter(|x| x.iter().map(|c| c.norm_sqr()).sum::<f64>() < r2)
                    .map(Point::new)
                    .collect::<std::result::Result<Vec<_>, _>>()?;
                return Ok(Configuration {
                    points,
                    window_radius: spec.window_radius,
                    seed,
                    generator: Generator::Hkpv,
                    d,
                    meta: TruncationMeta {
                        degree: basis.degree.iter().copied().max().unwrap_or(0),
                        tail_margin: missing,
                        accepted: total,
                        rejected,
                    },
                });
            }
            Err(SamplerError::Numeric(m)) => last = m,
            Err(e) => return Err(e),
        }
    }
    Err(SamplerError::Breakdown {
        retries: RETRIES,
        reason: last,
    })
}

/// Relative kernel mass at `|z| = ρ` outside degrees `≤ n`.
fn truncated_missing(d: usize, rho: f64, n: usize) -> f64 {
    let t = rho * rho;
    let total = (-(d as f64 + 1.0) * (-t).ln_1p()).exp();
    let mut partial = 0.0;
    let mut term = 1.0;
    for k in 0..=n {
        partial += term;
        term *= t * (k + 1 + d) as f64 / (k + 1) as f64;
    }
    (1.0 - partial / total).max(0.0)
}

/// `Σ_{k>n} C(k+d-1, d-1) ρ^{2(k+d)}`, the expected number of window
/// points carried by the dropped degrees.
fn window_missing(d: usize, rho: f64, n: usize) -> f64 {
    let t = rho * rho;
    let total = (d as f64 * (t.ln() - (-t).ln_1p())).exp();
    let mut partial = 0.0;
    let mut term = t.powi(d as i32);
    for k in 0..=n {
        partial += term;
        term *= t * (k + d) as f64 / (k + 1) as f64;
    }
    (total - partial).max(0.0)
}

/// Smallest degree whose excluded eigenvalue mass is below `1e-6`.
fn window_degree_cutoff(d: usize, rho: f64) -> usize {
    let t = rho * rho;
    let total = (d as f64 * (t.ln() - (-t).ln_1p())).exp();
    let mut partial = 0.0;
    let mut term = t.powi(d as i32);
    let mut k = 0usize;
    loop {
        partial += term;
        if total - partial < MISSING_MASS {
            return k;
        }
        term *= t * (k + d) as f64 / (k + 1) as f64;
        k += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multi_index_counts() {
        assert_eq!(multi_indices(4, 1).len(), 1);
        assert_eq!(multi_indices(4, 2).len(), 5);
        assert_eq!(multi_indices(4, 3).len(), 15);
        assert!(multi_indices(3, 3).iter().all(|a| a.iter().sum::<u32>() == 3));
    }

    #[test]
    fn window_cutoff_meets_missing_mass() {
        for &(d, r) in &[(1usize, 2.0f64), (1, 6.0), (2, 1.5)] {
            let rho = psdpp_hypgeom::disk::euclidean_radius(r);
            let n = window_degree_cutoff(d, rho);
            assert!(window_missing(d, rho, n) < MISSING_MASS);
            assert!(n == 0 || window_missing(d, rho, n - 1) >= MISSING_MASS);
        }
    }

    #[test]
    fn default_cutoff_is_minimal() {
        let n = default_degree_cutoff(1, 2.0).unwrap();
        let rho = psdpp_hypgeom::disk::euclidean_radius(2.0);
        assert!(truncated_missing(1, rho, n) <= 1e-6);
        assert!(truncated_missing(1, rho, n - 1) > 1e-6);
    }

    #[test]
    fn point_count_equals_basis_size() {
        let mut s = HkpvSpec::new(2, 1.0, HkpvMode::Truncated);
        s.window_radius = 30.0;
        s.degree_cutoff = Some(3);
        let c = sample_hkpv(&s, 5).unwrap();
        assert_eq!(c.meta.accepted, 10);
        assert_eq!(c.len(), 10);
    }
}
