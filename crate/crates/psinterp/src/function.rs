use std::collections::BTreeMap;
use std::sync::Arc;

use psdpp_hypgeom::{poisson_kernel, BoundaryPoint, Point, C64};
use psdpp_kernels::KernelCoeffs;
use statrs::function::gamma::ln_gamma;

use crate::record::{RkhsSpace, SectionRecord};
use crate::{PsError, Result};

/// Exponents `2^k`, `k = 1..=LACUNARY_TERMS`, of the default lacunary series.
const LACUNARY_TERMS: u32 = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FunctionKind {
    Constant,
    Monomial,
    Poisson,
    PoissonSzego,
    Lacunary,
    Pluriharmonic,
    KernelSection,
    HardyAtomic,
}

/// A test function on `D_d`.
///
/// Scalar kinds are harmonic in `d = 1` and M-harmonic or pluriharmonic in
/// higher dimension. `KernelSection` is the vector-valued `x ↦ K_W(·, x)`
/// and `HardyAtomic` carries both the scalar `P[hμ]` and the vector-valued
/// `x ↦ P(x, ·) ∈ L²(μ)`; both are summed as [`SectionRecord`]s.
#[derive(Debug, Clone)]
pub enum TestFunction {
    Constant { d: usize, value: C64 },
    /// `z^α` for a multi-index `α`.
    Monomial { alpha: Vec<u32> },
    /// Poisson kernel `P(·, ζ)` of the disk.
    Poisson { zeta: BoundaryPoint },
    /// Poisson–Szegő kernel `(1-|z|²)^d/|1-⟨z,ζ⟩|^{2d}`.
    PoissonSzego { zeta: BoundaryPoint },
    /// `Σ c_k z^{2^k}` on the disk, as `(k, c_k)` pairs.
    Lacunary { terms: Vec<(u32, f64)> },
    /// `Σ a_α z^α + Σ b_β conj(z^β)`; the constant lives in the
    /// holomorphic part.
    Pluriharmonic {
        d: usize,
        holo: Vec<(Vec<u32>, C64)>,
        anti: Vec<(Vec<u32>, C64)>,
    },
    KernelSection { space: Arc<RkhsSpace> },
    HardyAtomic { space: Arc<RkhsSpace>, h: Vec<C64> },
}

/// `c_k = 2^{k/2}·k` on exponents `2^k`, `k = 1..=512`.
pub fn default_lacunary_terms() -> Vec<(u32, f64)> {
    (1..=LACUNARY_TERMS)
        .map(|k| (k, 2f64.powf(0.5 * k as f64) * k as f64))
        .collect()
}

fn check_multi_index(alpha: &[u32], d: usize) -> Result<()> {
    if alpha.len() != d {
        return Err(PsError::Argument(format!(
            "multi-index of length {} in dimension {d}",
            alpha.len()
        )));
    }
    Ok(())
}

/// `∫_S |ζ^α|² dσ = (d-1)! α! / (d-1+|α|)!`.
pub(crate) fn ln_sphere_moment(alpha: &[u32]) -> f64 {
    let d = alpha.len() as f64;
    let n: u32 = alpha.iter().sum();
    ln_gamma(d) + alpha.iter().map(|&a| ln_gamma(a as f64 + 1.0)).sum::<f64>() - ln_gamma(d + n as f64)
}

fn monomial_value(alpha: &[u32], x: &Point) -> C64 {
    x.coords()
        .iter()
        .zip(alpha)
        .fold(C64::new(1.0, 0.0), |acc, (z, &a)| acc * z.powu(a))
}

/// Coefficients `q_k = ((-d)_k)²/((d)_k k!)` with
/// `∫_S P(rη, ζ)² dσ(η) = (1-r²)^{-d} Σ_k q_k r^{2k}`.
pub(crate) fn poisson_square_poly(d: usize) -> Vec<f64> {
    let mut q = vec![1.0];
    let mut c = 1.0;
    for k in 0..d {
        let kf = k as f64;
        let df = d as f64;
        // ratio of consecutive terms: (k-d)²/((d+k)(k+1))
        c *= (kf - df) * (kf - df) / ((df + kf) * (kf + 1.0));
        q.push(c);
    }
    q
}

/// Sphere radius `r = tanh(δ/2)` stored through `ln r²` and `ln(1-r²)` so
/// that values near the boundary keep their precision.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Radius {
    pub r2: f64,
    pub ln_r2: f64,
    pub ln_one_minus_r2: f64,
}

impl Radius {
    pub fn hyperbolic(delta: f64) -> Self {
        let e = (-delta).exp();
        let ln_r2 = 2.0 * ((-e).ln_1p() - e.ln_1p());
        // 1 - tanh² = cosh^{-2}, cosh(δ/2) = e^{δ/2}(1 + e^{-δ})/2
        let ln_cosh = 0.5 * delta + (0.5 * (1.0 + e)).ln();
        Radius {
            r2: ln_r2.exp(),
            ln_r2,
            ln_one_minus_r2: -2.0 * ln_cosh,
        }
    }
}

fn log_sum_exp(v: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = v.collect();
    let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

impl TestFunction {
    pub fn constant(d: usize, value: C64) -> Self {
        TestFunction::Constant { d, value }
    }

    pub fn one(d: usize) -> Self {
        Self::constant(d, C64::new(1.0, 0.0))
    }

    /// `z^n` on the disk.
    pub fn monomial(n: u32) -> Self {
        TestFunction::Monomial { alpha: vec![n] }
    }

    pub fn monomial_multi(alpha: Vec<u32>) -> Result<Self> {
        if alpha.is_empty() {
            return Err(PsError::Argument("empty multi-index".into()));
        }
        Ok(TestFunction::Monomial { alpha })
    }

    /// `P(·, e^{iθ})` on the disk.
    pub fn poisson(theta: f64) -> Self {
        TestFunction::Poisson {
            zeta: BoundaryPoint::circle(theta),
        }
    }

    pub fn poisson_szego(zeta: BoundaryPoint) -> Self {
        TestFunction::PoissonSzego { zeta }
    }

    /// The non-tempered witness `Σ 2^{k/2} k z^{2^k}`.
    pub fn lacunary() -> Self {
        TestFunction::Lacunary {
            terms: default_lacunary_terms(),
        }
    }

    pub fn lacunary_terms(mut terms: Vec<(u32, f64)>) -> Result<Self> {
        terms.sort_by_key(|t| t.0);
        if terms.iter().any(|&(k, _)| k > 1000) {
            return Err(PsError::Argument("lacunary exponents are limited to 2^1000".into()));
        }
        Ok(TestFunction::Lacunary { terms })
    }

    /// `Σ a_α z^α + Σ b_β conj(z^β)`. Repeated indices are merged, and a
    /// constant in the antiholomorphic part moves to the holomorphic one.
    pub fn pluriharmonic(d: usize, holo: Vec<(Vec<u32>, C64)>, anti: Vec<(Vec<u32>, C64)>) -> Result<Self> {
        let mut h: BTreeMap<Vec<u32>, C64> = BTreeMap::new();
        let mut a: BTreeMap<Vec<u32>, C64> = BTreeMap::new();
        for (alpha, c) in holo {
            check_multi_index(&alpha, d)?;
            *h.entry(alpha).or_default() += c;
        }
        for (beta, c) in anti {
            check_multi_index(&beta, d)?;
            if beta.iter().all(|&b| b == 0) {
                *h.entry(beta).or_default() += c;
            } else {
                *a.entry(beta).or_default() += c;
            }
        }
        Ok(TestFunction::Pluriharmonic {
            d,
            holo: h.into_iter().collect(),
            anti: a.into_iter().collect(),
        })
    }

    /// `Re z_1` in dimension `d`.
    pub fn real_part(d: usize) -> Self {
        let mut e1 = vec![0u32; d];
        e1[0] = 1;
        let half = C64::new(0.5, 0.0);
        Self::pluriharmonic(d, vec![(e1.clone(), half)], vec![(e1, half)]).expect("valid multi-index")
    }

    pub fn kernel_section(kernel: KernelCoeffs) -> Self {
        TestFunction::KernelSection {
            space: Arc::new(RkhsSpace::Kernel(kernel)),
        }
    }

    /// `P[hμ] = Σ_j w_j h_j P(·, ζ_j)` for `μ = Σ_j w_j δ_{ζ_j}`.
    pub fn hardy_atomic(atoms: Vec<BoundaryPoint>, weights: Vec<f64>, h: Vec<C64>) -> Result<Self> {
        if atoms.is_empty() || atoms.len() != weights.len() || atoms.len() != h.len() {
            return Err(PsError::Argument("atoms, weights and h must be nonempty of equal length".into()));
        }
        let d = atoms[0].dim();
        if atoms.iter().any(|a| a.dim() != d) {
            return Err(PsError::Argument("atoms of different dimension".into()));
        }
        if weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(PsError::Argument("atom weights must be positive".into()));
        }
        Ok(TestFunction::HardyAtomic {
            space: Arc::new(RkhsSpace::Hardy { atoms, weights }),
            h,
        })
    }

    pub fn kind(&self) -> FunctionKind {
        match self {
            TestFunction::Constant { .. } => FunctionKind::Constant,
            TestFunction::Monomial { .. } => FunctionKind::Monomial,
            TestFunction::Poisson { .. } => FunctionKind::Poisson,
            TestFunction::PoissonSzego { .. } => FunctionKind::PoissonSzego,
            TestFunction::Lacunary { .. } => FunctionKind::Lacunary,
            TestFunction::Pluriharmonic { .. } => FunctionKind::Pluriharmonic,
            TestFunction::KernelSection { .. } => FunctionKind::KernelSection,
            TestFunction::HardyAtomic { .. } => FunctionKind::HardyAtomic,
        }
    }

    /// Comma-free label used in CSV rows.
    pub fn label(&self) -> String {
        match self {
            TestFunction::Constant { .. } => "constant".into(),
            TestFunction::Monomial { alpha } => {
                let a: Vec<String> = alpha.iter().map(|a| a.to_string()).collect();
                format!("monomial({})", a.join(" "))
            }
            TestFunction::Poisson { .. } => "poisson".into(),
            TestFunction::PoissonSzego { .. } => "poisson_szego".into(),
            TestFunction::Lacunary { .. } => "lacunary".into(),
            TestFunction::Pluriharmonic { .. } => "pluriharmonic".into(),
            TestFunction::KernelSection { space } => match space.as_ref() {
                RkhsSpace::Kernel(k) => format!("kernel_section({})", k.weight_id),
                RkhsSpace::Hardy { .. } => "kernel_section".into(),
            },
            TestFunction::HardyAtomic { h, .. } => format!("hardy_atomic({})", h.len()),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            TestFunction::Constant { d, .. } | TestFunction::Pluriharmonic { d, .. } => *d,
            TestFunction::Monomial { alpha } => alpha.len(),
            TestFunction::Poisson { .. } | TestFunction::Lacunary { .. } => 1,
            TestFunction::PoissonSzego { zeta } => zeta.dim(),
            TestFunction::KernelSection { space } | TestFunction::HardyAtomic { space, .. } => space.dim(),
        }
    }

    /// Kinds summed as coefficient records.
    pub fn rkhs_space(&self) -> Option<&Arc<RkhsSpace>> {
        match self {
            TestFunction::KernelSection { space } | TestFunction::HardyAtomic { space, .. } => Some(space),
            _ => None,
        }
    }

    pub fn is_rkhs(&self) -> bool {
        self.rkhs_space().is_some()
    }

    /// Scalar value `f(x)`. Kernel sections are vector-valued and have none.
    pub fn evaluate(&self, x: &Point) -> Result<C64> {
        if x.dim() != self.dim() {
            return Err(PsError::Geometry(psdpp_hypgeom::GeomError::DimensionMismatch(
                x.dim(),
                self.dim(),
            )));
        }
        Ok(match self {
            TestFunction::Constant { value, .. } => *value,
            TestFunction::Monomial { alpha } => monomial_value(alpha, x),
            TestFunction::Poisson { zeta } | TestFunction::PoissonSzego { zeta } => {
                C64::new(poisson_kernel(x, zeta)?, 0.0)
            }
            TestFunction::Lacunary { terms } => lacunary_value(terms, x.coords()[0]),
            TestFunction::Pluriharmonic { holo, anti, .. } => {
                let h: C64 = holo.iter().map(|(a, c)| c * monomial_value(a, x)).sum();
                let a: C64 = anti.iter().map(|(b, c)| c * monomial_value(b, x).conj()).sum();
                h + a
            }
            TestFunction::KernelSection { .. } => {
                return Err(PsError::Contract("kernel sections are vector-valued".into()))
            }
            TestFunction::HardyAtomic { space, h } => {
                let RkhsSpace::Hardy { atoms, weights } = space.as_ref() else {
                    unreachable!("hardy functions carry a Hardy space")
                };
                let mut v = C64::new(0.0, 0.0);
                for ((a, w), hj) in atoms.iter().zip(weights).zip(h) {
                    v += hj * (w * poisson_kernel(x, a)?);
                }
                v
            }
        })
    }

    /// `F(x)` as a one-term record `{(x, 1)}` for the vector-valued kinds.
    pub fn section(&self, x: &Point) -> Result<SectionRecord> {
        let space = self
            .rkhs_space()
            .ok_or_else(|| PsError::Contract(format!("{} is scalar-valued", self.label())))?;
        let mut r = SectionRecord::new(space.clone());
        r.push(x.clone(), C64::new(1.0, 0.0));
        Ok(r)
    }

    /// `ln ∫_S |f(rη)|² dσ(η)` at `r = tanh(δ/2)`, with `‖F‖²` for the
    /// vector-valued kinds. `+∞` when it cannot be certified.
    pub(crate) fn ln_sphere_mean_sq(&self, r: Radius) -> f64 {
        match self {
            TestFunction::Constant { value, .. } => 2.0 * value.norm().ln(),
            TestFunction::Monomial { alpha } => {
                ln_sphere_moment(alpha) + alpha.iter().sum::<u32>() as f64 * r.ln_r2
            }
            TestFunction::Poisson { .. } | TestFunction::PoissonSzego { .. } => ln_poisson_mean_sq(self.dim(), r),
            TestFunction::Lacunary { terms } => log_sum_exp(
                terms
                    .iter()
                    .map(|&(k, c)| 2.0 * c.abs().ln() + 2f64.powi(k as i32) * r.ln_r2),
            ),
            TestFunction::Pluriharmonic { holo, anti, .. } => log_sum_exp(holo.iter().chain(anti).map(|(a, c)| {
                2.0 * c.norm().ln() + ln_sphere_moment(a) + a.iter().sum::<u32>() as f64 * r.ln_r2
            })),
            TestFunction::KernelSection { space } => match space.as_ref() {
                RkhsSpace::Kernel(k) => ln_kernel_diag(k, r),
                RkhsSpace::Hardy { .. } => f64::INFINITY,
            },
            TestFunction::HardyAtomic { space, .. } => {
                let RkhsSpace::Hardy { weights, .. } = space.as_ref() else {
                    unreachable!("hardy functions carry a Hardy space")
                };
                weights.iter().sum::<f64>().ln() + ln_poisson_mean_sq(self.dim(), r)
            }
        }
    }

    /// `ln` of an upper bound on `∫_S |f(rη)| dσ(η)` (`‖F‖` for the
    /// vector-valued kinds), used by the truncation tail bounds.
    pub(crate) fn ln_sphere_mean_abs(&self, r: Radius) -> f64 {
        match self {
            // P(·, ζ) > 0 has sphere mean P(0, ζ) = 1.
            TestFunction::Poisson { .. } | TestFunction::PoissonSzego { .. } => 0.0,
            // ‖F_μ(x)‖ ≤ Σ_j √w_j P(x, ζ_j)
            TestFunction::HardyAtomic { space, .. } => {
                let RkhsSpace::Hardy { weights, .. } = space.as_ref() else {
                    unreachable!("hardy functions carry a Hardy space")
                };
                weights.iter().map(|w| w.sqrt()).sum::<f64>().ln()
            }
            _ => 0.5 * self.ln_sphere_mean_sq(r),
        }
    }
}

fn lacunary_value(terms: &[(u32, f64)], z: C64) -> C64 {
    // terms are sorted by k; p runs through z^{2^k}
    let mut sum = C64::new(0.0, 0.0);
    let mut p = z;
    let mut k = 0u32;
    for &(kk, c) in terms {
        while k < kk {
            p = p * p;
            k += 1;
        }
        if p.norm_sqr() == 0.0 {
            break;
        }
        sum += c * p;
    }
    sum
}

fn ln_poisson_mean_sq(d: usize, r: Radius) -> f64 {
    let q = poisson_square_poly(d);
    let poly: f64 = q.iter().rev().fold(0.0, |acc, c| acc * r.r2 + c);
    poly.ln() - d as f64 * r.ln_one_minus_r2
}

fn ln_kernel_diag(k: &KernelCoeffs, r: Radius) -> f64 {
    if crate::record::is_unit(k) {
        return -((k.d + 1) as f64) * r.ln_one_minus_r2;
    }
    match k.eval_diag(r.r2) {
        Ok(v) => (v.value + v.tail_bound).ln(),
        Err(_) => f64::INFINITY,
    }
}
