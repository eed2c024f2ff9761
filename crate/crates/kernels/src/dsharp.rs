//! The angular average
//! `D^♯(u) = Σ a_n v^n [(n+1)(1-v) + 2v] / (1-v)³`, `v = u²`,
//! of `K_W(x e^{iθ}, y) |K_D(x e^{iθ}, y)|²` over `θ`.
//!
//! Everything is computed for the scaled quantity `S(ε) = ε⁴ D^♯` with
//! `ε = 1 - v`, which stays of the size of `a_{1/ε}` even when `ε` is far
//! below the range where `D^♯` itself is representable. For `ε ≪ 1/N` the
//! series has about `1/ε` significant terms; the first `N` are summed and the
//! rest replaced by an Euler–Maclaurin integral of a real-order interpolant
//! of `a_ν`.

use std::sync::OnceLock;

use psdpp_quad::{integrate_breaks, Chebyshev, Tolerance};

use crate::coeffs::{coefficient, degree_multiplicity};
use crate::{KernelCoeffs, KernelError, Result, SeriesValue, WeightKind, WeightSpec};

const DIRECT_TERMS: usize = 4096;
/// Largest `-ln ε` covered by the interpolation table.
pub const SIGMA_MAX: f64 = 700.0;
const TAU_MAX: f64 = 708.0;

/// `a_ν` for real `ν` beyond the stored coefficients.
#[derive(Debug, Clone)]
enum RealOrder {
    Closed(WeightSpec),
    /// Chebyshev interpolant of `ln m_{e^τ + d - 1}` in `τ`.
    Table { d: usize, lnm: Chebyshev },
    Quadrature(WeightSpec),
}

impl RealOrder {
    fn new(w: &WeightSpec, from: f64) -> Result<Self> {
        match w.kind {
            WeightKind::Unit | WeightKind::StandardAlpha(_) => Ok(RealOrder::Closed(w.clone())),
            WeightKind::Critical | WeightKind::LogSupercritical(_) => {
                let lo = from.ln();
                let mut breaks = vec![lo];
                let mut b = lo;
                while b < TAU_MAX {
                    b = (b + 8.0).min(TAU_MAX);
                    breaks.push(b);
                }
                let d = w.d as f64;
                let mut err = None;
                let lnm = Chebyshev::build(
                    |tau: f64| match w.moment(tau.exp() + d - 1.0) {
                        Ok(m) => m.ln(),
                        Err(e) => {
                            err.get_or_insert(e);
                            0.0
                        }
                    },
                    &breaks,
                    16,
                );
                if let Some(e) = err {
                    return Err(e);
                }
                Ok(RealOrder::Table { d: w.d, lnm })
            }
            WeightKind::Custom(_) => Ok(RealOrder::Quadrature(w.clone())),
        }
    }

    fn ln_a(&self, nu: f64) -> f64 {
        match self {
            RealOrder::Closed(w) => {
                let d = w.d;
                let lnm = w.ln_moment_closed(nu + d as f64 - 1.0).expect("closed-form weight");
                (degree_multiplicity(nu, d) / d as f64).ln() - lnm
            }
            RealOrder::Table { d, lnm } => (degree_multiplicity(nu, *d) / *d as f64).ln() - lnm.eval(nu.ln()),
            RealOrder::Quadrature(w) => coefficient(w, nu).map(f64::ln).unwrap_or(f64::NAN),
        }
    }
}

/// Evaluator for `D^♯` of a `d = 1` radial weight.
#[derive(Debug, Clone)]
pub struct DsharpSeries {
    a: Vec<f64>,
    weight: Option<WeightSpec>,
    real: OnceLock<Result<RealOrder>>,
    table: Option<Chebyshev>,
}

impl DsharpSeries {
    /// Summation-only evaluator.
    pub fn new(k: &KernelCoeffs) -> Result<Self> {
        if k.d != 1 {
            return Err(KernelError::Argument(format!(
                "the angular average is defined for d = 1, got d = {}",
                k.d
            )));
        }
        if k.coeffs.len() < 2 {
            return Err(KernelError::Argument("need at least two coefficients".into()));
        }
        let n = k.coeffs.len().min(DIRECT_TERMS);
        let a = k.coeffs[..n].to_vec();
        Ok(DsharpSeries {
            a,
            weight: k.weight().cloned(),
            real: OnceLock::new(),
            table: None,
        })
    }

    /// Evaluator with a table of `ln S` on `σ = -ln ε ∈ [0, SIGMA_MAX]`,
    /// for repeated evaluation inside quadratures.
    pub fn tabulated(k: &KernelCoeffs) -> Result<Self> {
        let mut s = Self::new(k)?;
        if s.weight.is_some() {
            let breaks = [
                0.0, 0.25, 0.5, 1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 11.0, 16.0, 24.0, 32.0, 48.0, 64.0, 96.0, 128.0,
                192.0, 256.0, 384.0, 512.0, SIGMA_MAX,
            ];
            let mut err = None;
            let table = Chebyshev::build(
                |sigma: f64| match s.scaled_direct((-sigma).exp()) {
                    Ok(v) => v.value.ln(),
                    Err(e) => {
                        err.get_or_insert(e);
                        0.0
                    }
                },
                &breaks,
                20,
            );
            if let Some(e) = err {
                return Err(e);
            }
            s.table = Some(table);
        }
        Ok(s)
    }

    /// `S(ε) = ε⁴ D^♯` by summation, with an error estimate.
    ///
    /// Without a real-order interpolant the reported bound is the
    /// log-convex majorant of the dropped terms; with one it is the size of
    /// the last Euler–Maclaurin correction.
    pub fn scaled_direct(&self, eps: f64) -> Result<SeriesValue<f64>> {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(KernelError::Range { value: 1.0 - eps, max: 1.0 });
        }
        let v = 1.0 - eps;
        let n = self.a.len();
        let mut sum = 0.0;
        let mut vn = 1.0;
        for (i, &a) in self.a.iter().enumerate() {
            sum += eps * a * vn * ((i as f64 + 1.0) * eps + 2.0 * v);
            vn *= v;
        }
        let lambda = -(-eps).ln_1p();
        let nf = n as f64;
        if nf * lambda > 745.0 || v == 0.0 {
            return Ok(SeriesValue { value: sum, tail_bound: 0.0 });
        }
        let real = match &self.weight {
            Some(w) => Some(
                self.real
                    .get_or_init(|| RealOrder::new(w, n as f64))
                    .as_ref()
                    .map_err(Clone::clone)?,
            ),
            None => None,
        };
        let Some(real) = real else {
            let l = n - 1;
            let q = self.a[l] / self.a[l - 1];
            let y = q * v;
            if y >= 1.0 {
                return Err(KernelError::Range { value: v.sqrt(), max: 1.0 });
            }
            let lf = l as f64;
            let tail = eps
                * self.a[l]
                * (lf * v.ln()).exp()
                * (((lf + 1.0) * eps + 2.0 * v) * y / (1.0 - y) + eps * y / ((1.0 - y) * (1.0 - y)));
            return Ok(SeriesValue { value: sum, tail_bound: tail });
        };
        let vn_big = (-nf * lambda).exp();
        let r = eps / lambda;
        // Mass of e^{-y} a(N + y/λ) sits at y ≳ Nλ when Nλ ≪ 1.
        let mut breaks = vec![0.0];
        let mut b = 1e-3 * (nf * lambda).min(1.0);
        while b < 60.0 {
            breaks.push(b);
            b *= 4.0;
        }
        breaks.push(60.0);
        let integral = integrate_breaks(
            |y: f64| {
                let nu = nf + y / lambda;
                real.ln_a(nu).exp() * ((nf + 1.0) * eps + y * r + 2.0 * v) * (-y).exp()
            },
            &breaks,
            Tolerance::new(0.0, 1e-11),
        )
        .map_err(|e| KernelError::Numeric(e.to_string()))?;
        let ln_a_n = real.ln_a(nf);
        let f_n = eps * ln_a_n.exp() * vn_big * ((nf + 1.0) * eps + 2.0 * v);
        let h = 0.5;
        let dln_a = (real.ln_a(nf + h) - real.ln_a(nf - h)) / (2.0 * h);
        let df_n = f_n * (dln_a - lambda + eps / ((nf + 1.0) * eps + 2.0 * v));
        let em = r * vn_big * integral.value + 0.5 * f_n - df_n / 12.0;
        Ok(SeriesValue {
            value: sum + em,
            tail_bound: (df_n / 12.0).abs() * lambda * lambda + r * vn_big * integral.error,
        })
    }

    /// `ln(ε⁴ D^♯)` from the interpolation table (summation if there is none
    /// or `ε` is outside it).
    pub fn ln_scaled(&self, eps: f64) -> Result<f64> {
        let sigma = -eps.ln();
        match &self.table {
            Some(t) if (0.0..=SIGMA_MAX).contains(&sigma) => Ok(t.eval(sigma)),
            _ => {
                let v = self.scaled_direct(eps)?;
                Ok(v.value.ln())
            }
        }
    }

    /// `D^♯` at `ε = 1 - u²`.
    pub fn eval_eps(&self, eps: f64) -> Result<f64> {
        Ok((self.ln_scaled(eps)? - 4.0 * eps.ln()).exp())
    }

    /// Largest trailing Chebyshev coefficient of the table.
    pub fn table_tail(&self) -> f64 {
        self.table.as_ref().map_or(0.0, Chebyshev::tail_magnitude)
    }
}

/// `D^♯(u)` for `u = |xy| ∈ [0, 1)`.
pub fn angular_average_dsharp(k: &KernelCoeffs, u: f64) -> Result<SeriesValue<f64>> {
    if !(0.0..1.0).contains(&u) {
        return Err(KernelError::Range { value: u, max: 1.0 });
    }
    let s = DsharpSeries::new(k)?;
    let eps = 1.0 - u * u;
    let v = s.scaled_direct(eps)?;
    let scale = eps.powi(4);
    Ok(SeriesValue {
        value: v.value / scale,
        tail_bound: v.tail_bound / scale,
    })
}
