use std::cmp::Ordering;

use psdpp_hypgeom::{bergman_distance, poincare_mass, Point, C64};
use psdpp_kernels::RadialProfile;
use psdpp_quad::{integrate_to_inf, QuadError, Tolerance};
use psdpp_sampler::Configuration;

use crate::function::Radius;
use crate::record::{SectionRecord, Statistic};
use crate::{PsError, Result, TestFunction};

/// Relative size of the tail bound at which the default `K_max` stops.
const K_MAX_TAIL_FRACTION: f64 = 1e-3;

pub const CSV_HEADER: &str = "seed,s,z_re,z_im,f_kind,g,g_f_re,g_f_im,ratio_re,ratio_im,err_abs,tail_bound";

/// Window part of the Poincaré series and a bound on the expected mass of
/// the points outside the window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoincareSum {
    pub value: f64,
    pub tail_bound: f64,
    pub count: usize,
}

/// Points of one annulus `A_k(z) = {k ≤ d_B(x, z) < k+1}`.
#[derive(Debug, Clone)]
pub struct AnnularBlock {
    pub k: u64,
    pub count: usize,
    pub g: f64,
    pub g_f: Statistic,
}

#[derive(Debug, Clone)]
pub struct PSEstimate {
    pub seed: u64,
    pub s: f64,
    pub z: Point,
    pub f_kind: String,
    pub g: f64,
    pub g_f: Statistic,
    /// `g_f / g`, absent when `g = 0`.
    pub ratio: Option<Statistic>,
    /// `g_f / g_P(s)`.
    pub normalized: Statistic,
    pub annular: Vec<AnnularBlock>,
    pub k_max: u64,
    /// Bound on the expected `|·|` of the dropped part of `g_f`: annuli
    /// beyond `k_max` and everything outside the window.
    pub tail_bound: f64,
    /// The same bound for `g`.
    pub g_tail_bound: f64,
    /// `|ratio - f(z)|`, or `‖ratio - F(z)‖` for records.
    pub err_abs: Option<f64>,
    /// `|normalized - f(z)|`, or the record norm.
    pub err_normalized: Option<f64>,
}

impl PSEstimate {
    /// One CSV row matching [`CSV_HEADER`]. Records report their norm in
    /// the real column and `0` in the imaginary one.
    pub fn csv_row(&self) -> Result<String> {
        let parts = |v: &Statistic| -> Result<(f64, f64)> {
            Ok(match v {
                Statistic::Scalar(c) => (c.re, c.im),
                Statistic::Record(r) => (r.norm()?, 0.0),
            })
        };
        let (gfr, gfi) = parts(&self.g_f)?;
        let (rr, ri) = match &self.ratio {
            Some(r) => parts(r)?,
            None => (f64::NAN, f64::NAN),
        };
        let z0 = self.z.coords()[0];
        Ok(format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.seed,
            self.s,
            z0.re,
            z0.im,
            self.f_kind,
            self.g,
            gfr,
            gfi,
            rr,
            ri,
            self.err_abs.unwrap_or(f64::NAN),
            self.tail_bound
        ))
    }
}

fn check_exponent(s: f64, d: usize) -> Result<()> {
    if !(s > d as f64) || !s.is_finite() {
        return Err(PsError::Domain(format!(
            "the Poincaré series needs s > d (got s = {s}, d = {d}); s = d is critical"
        )));
    }
    Ok(())
}

fn check_dims(x: &Configuration, z: &Point) -> Result<()> {
    if z.dim() != x.d {
        return Err(PsError::Geometry(psdpp_hypgeom::GeomError::DimensionMismatch(z.dim(), x.d)));
    }
    Ok(())
}

fn lexicographic(a: &Point, b: &Point) -> Ordering {
    for (p, q) in a.coords().iter().zip(b.coords()) {
        let o = p.re.total_cmp(&q.re).then(p.im.total_cmp(&q.im));
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

/// Points with their distance to `z`, in annulus order and then
/// lexicographic coordinate order.
fn ordered_points<'a>(x: &'a Configuration, z: &Point) -> Result<Vec<(u64, f64, &'a Point)>> {
    let mut v = x
        .points
        .iter()
        .map(|p| {
            let delta = bergman_distance(p, z)?;
            Ok((delta.floor() as u64, delta, p))
        })
        .collect::<Result<Vec<_>>>()?;
    v.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| lexicographic(a.2, b.2)));
    Ok(v)
}

/// Coefficients of `(1-u)^{2d-1}(1+u)`.
fn radial_poly(d: usize) -> Vec<f64> {
    let mut p = vec![1.0];
    for _ in 0..2 * d - 1 {
        let mut q = vec![0.0; p.len() + 1];
        for (i, c) in p.iter().enumerate() {
            q[i] += c;
            q[i + 1] -= c;
        }
        p = q;
    }
    let mut q = vec![0.0; p.len() + 1];
    for (i, c) in p.iter().enumerate() {
        q[i] += c;
        q[i + 1] += c;
    }
    q
}

/// `∫_L^∞ e^{-sδ} dμ(δ)` in closed form, with the radial density
/// `(d/4^d) e^{dδ}(1-e^{-δ})^{2d-1}(1+e^{-δ})`.
fn poincare_tail_integral(d: usize, s: f64, l: f64) -> f64 {
    let df = d as f64;
    let pref = df / 4f64.powi(d as i32);
    radial_poly(d)
        .iter()
        .enumerate()
        .map(|(j, b)| {
            let e = s - df + j as f64;
            b * (-e * l).exp() / e
        })
        .sum::<f64>()
        * pref
}

/// Bound on `E Σ_{x ∉ B(o, R)} e^{-s d_B(x, z)}`.
///
/// `d_B(x, z) ≥ d_B(x, o) - d_B(o, z)` reduces it to
/// `e^{s d_B(o,z)} ∫_{d_B(x,o) ≥ R} e^{-s d_B(x,o)} dμ`.
pub fn poincare_tail_bound(d: usize, s: f64, z: &Point, window_radius: f64) -> Result<f64> {
    check_exponent(s, d)?;
    let dz = bergman_distance(z, &Point::origin(z.dim()))?;
    Ok((s * dz).exp() * poincare_tail_integral(d, s, (window_radius).max(0.0)))
}

/// Bound on the expected `|·|` of `Σ e^{-s d_B(x,z)} f(x)` over the points
/// with `d_B(x, o) ≥ L`, from the sphere means of `|f|`.
fn tail_integral(f: &TestFunction, s: f64, l: f64, dz: f64) -> Result<f64> {
    let d = f.dim();
    let df = d as f64;
    let eps = s - df;
    let pref = df / 4f64.powi(d as i32);
    let density = |y: f64| {
        let delta = l + y / eps;
        let e = (-delta).exp();
        let ln_a = f.ln_sphere_mean_abs(Radius::hyperbolic(delta));
        ((s * dz) + (df - s) * delta + ln_a).exp()
            * pref
            * (-(-delta).exp_m1()).powi(2 * d as i32 - 1)
            * (1.0 + e)
            / eps
    };
    // e^{-y} decay unless |f| grows; a non-decaying integrand means the
    // expected absolute tail is infinite.
    let (g0, g_far) = (density(0.0).max(density(1.0)), density(400.0));
    if !g_far.is_finite() || !g0.is_finite() || g_far > 1e-30 * g0 {
        return Ok(f64::INFINITY);
    }
    let v = match integrate_to_inf(density, 0.0, Tolerance::new(0.0, 1e-8)) {
        Ok(i) => i.value + i.error,
        Err(QuadError::NotConverged { value, error, .. }) => value + error,
        Err(e) => return Err(e.into()),
    };
    Ok(v)
}

/// Tail bound for `g_X(s, z; f)` when annuli beyond `k` and points outside
/// `B(o, R)` are dropped.
pub fn tail_bound(f: &TestFunction, s: f64, z: &Point, window_radius: f64, k: Option<u64>) -> Result<f64> {
    check_exponent(s, f.dim())?;
    let dz = bergman_distance(z, &Point::origin(z.dim()))?;
    let l = match k {
        Some(k) => window_radius.min(k as f64 + 1.0 - dz),
        None => window_radius,
    }
    .max(0.0);
    tail_integral(f, s, l, dz)
}

/// Poincaré series `Σ_{x ∈ X} e^{-s d_B(x, z)}` over the window.
pub fn poincare_series(x: &Configuration, s: f64, z: &Point) -> Result<PoincareSum> {
    check_dims(x, z)?;
    check_exponent(s, x.d)?;
    let pts = ordered_points(x, z)?;
    let value = pts.iter().map(|&(_, delta, _)| (-s * delta).exp()).sum();
    Ok(PoincareSum {
        value,
        tail_bound: poincare_tail_bound(x.d, s, z, x.window_radius)?,
        count: pts.len(),
    })
}

enum Acc {
    Scalar(C64),
    Record(SectionRecord),
}

impl Acc {
    fn new(f: &TestFunction) -> Acc {
        match f.rkhs_space() {
            Some(space) => Acc::Record(SectionRecord::new(space.clone())),
            None => Acc::Scalar(C64::new(0.0, 0.0)),
        }
    }

    fn add(&mut self, f: &TestFunction, p: &Point, w: f64) -> Result<()> {
        match self {
            Acc::Scalar(v) => *v += w * f.evaluate(p)?,
            Acc::Record(r) => r.push(p.clone(), C64::new(w, 0.0)),
        }
        Ok(())
    }

    fn into_stat(self) -> Statistic {
        match self {
            Acc::Scalar(v) => Statistic::Scalar(v),
            Acc::Record(r) => Statistic::Record(r),
        }
    }
}

fn error_against(f: &TestFunction, v: &Statistic, z: &Point) -> Result<Option<f64>> {
    Ok(match v {
        Statistic::Scalar(c) => Some((c - f.evaluate(z)?).norm()),
        Statistic::Record(r) => Some(r.sub(&f.section(z)?)?.norm()?),
    })
}

/// Weighted Poincaré sum `g_X(s, z; f)` accumulated annulus by annulus.
///
/// `k_max = None` picks the smallest `K` whose tail bound is below
/// `1e-3·|g_f|`, or keeps every annulus when none is.
pub fn ps_weighted_sum(
    x: &Configuration,
    s: f64,
    z: &Point,
    f: &TestFunction,
    k_max: Option<u64>,
) -> Result<PSEstimate> {
    check_dims(x, z)?;
    if f.dim() != x.d {
        return Err(PsError::Argument(format!(
            "test function of dimension {} on a configuration of dimension {}",
            f.dim(),
            x.d
        )));
    }
    check_exponent(s, x.d)?;
    let pts = ordered_points(x, z)?;
    let last = pts.last().map(|p| p.0).unwrap_or(0);

    // Running totals after each annulus, and the blocks themselves.
    let mut g = 0.0;
    let mut acc = Acc::new(f);
    let mut blocks: Vec<AnnularBlock> = Vec::new();
    let mut totals: Vec<(u64, f64, Statistic)> = Vec::new();
    let mut i = 0;
    while i < pts.len() {
        let k = pts[i].0;
        let mut block = Acc::new(f);
        let mut bg = 0.0;
        let mut count = 0;
        while i < pts.len() && pts[i].0 == k {
            let (_, delta, p) = pts[i];
            let w = (-s * delta).exp();
            g += w;
            bg += w;
            acc.add(f, p, w)?;
            block.add(f, p, w)?;
            count += 1;
            i += 1;
        }
        blocks.push(AnnularBlock {
            k,
            count,
            g: bg,
            g_f: block.into_stat(),
        });
        let snapshot = match &acc {
            Acc::Scalar(v) => Statistic::Scalar(*v),
            Acc::Record(r) => Statistic::Record(r.clone()),
        };
        totals.push((k, g, snapshot));
    }

    let window = x.window_radius;
    let chosen = match k_max {
        Some(k) => {
            let j = totals.iter().rposition(|t| t.0 <= k);
            (k, j)
        }
        None => {
            let mut pick = None;
            for (j, t) in totals.iter().enumerate() {
                let tb = tail_bound(f, s, z, window, Some(t.0))?;
                if tb < K_MAX_TAIL_FRACTION * t.2.magnitude()? {
                    pick = Some((t.0, Some(j)));
                    break;
                }
            }
            pick.unwrap_or((last, totals.len().checked_sub(1)))
        }
    };
    let (k_sel, j) = chosen;
    let (g, g_f) = match j {
        Some(j) => (totals[j].1, totals[j].2.clone()),
        None => (0.0, Acc::new(f).into_stat()),
    };
    blocks.retain(|b| b.k <= k_sel);
    let k_bound = if k_sel >= last { None } else { Some(k_sel) };
    let tb = tail_bound(f, s, z, window, k_bound)?;
    let gtb = tail_bound(&TestFunction::one(x.d), s, z, window, k_bound)?;
    let gp = poincare_mass(s, x.d)?;
    let ratio = (g > 0.0).then(|| g_f.divided(g));
    let normalized = g_f.divided(gp);
    let err_abs = match &ratio {
        Some(r) => error_against(f, r, z)?,
        None => None,
    };
    let err_normalized = error_against(f, &normalized, z)?;
    Ok(PSEstimate {
        seed: x.seed,
        s,
        z: z.clone(),
        f_kind: f.label(),
        g,
        g_f,
        ratio,
        normalized,
        annular: blocks,
        k_max: k_sel,
        tail_bound: tb,
        g_tail_bound: gtb,
        err_abs,
        err_normalized,
    })
}

#[derive(Debug, Clone)]
pub struct RatioResult {
    /// `g_X(s, z; f)/g_X(s, z)`.
    pub estimate: Statistic,
    /// `g_X(s, z; f)/g_P(s)`.
    pub normalized: Statistic,
    pub error: Option<f64>,
    pub normalized_error: Option<f64>,
    pub g: f64,
}

/// Interpolation estimate `g_X(s, z; f)/g_X(s, z)` and its error against
/// `f(z)` (the `L²`-norm error `‖R_X - F(z)‖` for vector-valued `F`).
pub fn ps_ratio(x: &Configuration, s: f64, z: &Point, f: &TestFunction) -> Result<RatioResult> {
    let e = ps_weighted_sum(x, s, z, f, None)?;
    let Some(estimate) = e.ratio else {
        return Err(PsError::Degenerate(format!(
            "Poincaré series vanishes at z (configuration of {} points)",
            x.len()
        )));
    };
    Ok(RatioResult {
        estimate,
        normalized: e.normalized,
        error: e.err_abs,
        normalized_error: e.err_normalized,
        g: e.g,
    })
}

#[derive(Debug, Clone)]
pub struct GeneralizedSum {
    /// `Σ R(φ_z(x))`.
    pub g_r: f64,
    /// `Σ R(φ_z(x)) f(x)`.
    pub g_r_f: Statistic,
    pub count: usize,
}

/// `g^R_X(z; f) = Σ R(φ_z(x)) f(x)` for a compactly supported radial `R`.
///
/// The sum is exact when `B(z, supp R)` lies inside the window.
pub fn ps_generalized(x: &Configuration, profile: &RadialProfile, z: &Point, f: &TestFunction) -> Result<GeneralizedSum> {
    check_dims(x, z)?;
    if !profile.is_compact() {
        return Err(PsError::Contract(format!(
            "profile {} is not compactly supported",
            profile.label()
        )));
    }
    let dz = bergman_distance(z, &Point::origin(z.dim()))?;
    let support = profile.support_radius();
    let room = x.window_radius - dz;
    if support > room {
        return Err(PsError::Window { support, room });
    }
    let mut g = 0.0;
    let mut acc = Acc::new(f);
    let mut count = 0;
    for (_, delta, p) in ordered_points(x, z)? {
        let w = profile.eval_hyperbolic(delta);
        if w != 0.0 {
            g += w;
            acc.add(f, p, w)?;
            count += 1;
        }
    }
    Ok(GeneralizedSum {
        g_r: g,
        g_r_f: acc.into_stat(),
        count,
    })
}

/// Moments `∫ x^m dν_X(s, z)`, `m = 0..=m_max`, of the normalised
/// Patterson–Sullivan measure `ν_X = g^{-1} Σ e^{-s d_B(x,z)} δ_x` on the disk.
///
/// As `s ↓ 1` they approach the moments `z^m` of harmonic measure at `z`.
pub fn harmonic_measure_moments(x: &Configuration, s: f64, z: &Point, m_max: usize) -> Result<Vec<C64>> {
    check_dims(x, z)?;
    if x.d != 1 {
        return Err(PsError::Argument("harmonic measure moments are defined on the disk".into()));
    }
    check_exponent(s, 1)?;
    let pts = ordered_points(x, z)?;
    let mut g = 0.0;
    let mut m = vec![C64::new(0.0, 0.0); m_max + 1];
    for (_, delta, p) in &pts {
        let w = (-s * delta).exp();
        g += w;
        let mut pw = C64::new(1.0, 0.0);
        let zc = p.coords()[0];
        for mk in m.iter_mut().skip(1) {
            pw *= zc;
            *mk += w * pw;
        }
    }
    if !(g > 0.0) {
        return Err(PsError::Degenerate("empty configuration".into()));
    }
    m[0] = C64::new(1.0, 0.0);
    for mk in m.iter_mut().skip(1) {
        *mk /= g;
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_closed_form_at_zero_is_poincare_mass() {
        for d in 1..=3 {
            let s = d as f64 + 0.7;
            let gp = poincare_mass(s, d).unwrap();
            assert!((poincare_tail_integral(d, s, 0.0) - gp).abs() < 1e-9 * gp, "d = {d}");
        }
    }

    #[test]
    fn numeric_tail_matches_closed_form() {
        for d in 1..=2 {
            let s = d as f64 + 0.3;
            let f = TestFunction::one(d);
            let num = tail_integral(&f, s, 3.0, 0.0).unwrap();
            let exact = poincare_tail_integral(d, s, 3.0);
            assert!((num - exact).abs() < 1e-6 * exact, "d = {d}: {num} vs {exact}");
        }
    }
}
