//! Bergman kernels of radial weights on the unit ball.
//!
//! A radial weight `W` gives the kernel `K_W(z, w) = Σ_n a_n ⟨z, w⟩^n`. The
//! coefficients come from one-dimensional moments of `W` ([`WeightSpec::moment`]),
//! are stored in [`KernelCoeffs`] together with a certified tail bound, and
//! feed the angular average [`DsharpSeries`] used by the variance engine.

mod coeffs;
mod dsharp;
mod profile;
mod weight;

pub use coeffs::{
    bergman_kernel, degree_multiplicity, radial_weight_coeffs, weighted_kernel_eval, KernelCoeffs, SeriesValue,
    DEFAULT_TAIL_TOL,
};
pub use dsharp::{angular_average_dsharp, DsharpSeries, SIGMA_MAX};
pub use profile::RadialProfile;
pub use weight::{WeightKind, WeightSpec};

use psdpp_hypgeom::GeomError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum KernelError {
    #[error(transparent)]
    Geometry(#[from] GeomError),
    #[error("weight is not admissible: {0}")]
    Admissibility(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("argument {value} outside the certified range (max {max})")]
    Range { value: f64, max: f64 },
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("malformed coefficient table: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, KernelError>;

/// `∫_{log 4}^∞ (1 - 4e^{-x})^k x^{-2} dx`.
pub fn critical_claim_integral(k: u64) -> f64 {
    weight::log_moment(k as f64, 0.0).expect("log-type moment quadrature converges for every k")
}

/// `E(t) = (1-t)^{-4} log(2/(1-t))`.
pub fn e_function(t: f64) -> f64 {
    (1.0 - t).powi(-4) * (2.0 / (1.0 - t)).ln()
}

/// `Σ_k (k+1)^{d-1} log(k+2) t^k`, summed until the terms are negligible.
pub fn log_series(d: usize, t: f64) -> f64 {
    assert!((0.0..1.0).contains(&t), "log series needs t in [0, 1)");
    let mut sum = 0.0;
    let mut tk = 1.0;
    let mut k = 0u64;
    loop {
        let kf = k as f64;
        let term = (kf + 1.0).powi(d as i32 - 1) * (kf + 2.0).ln() * tk;
        sum += term;
        if term < 1e-17 * sum && kf * (1.0 - t) > d as f64 {
            return sum;
        }
        tk *= t;
        k += 1;
    }
}

/// `K_W(r, r)/K_{W_cr}(r, r)` along a grid of Euclidean radii.
///
/// `W` must be super-critical: `W/W_cr` has to increase towards the
/// boundary, which is checked on `1 - |z|² ∈ {1e-2, 1e-4, 1e-8}`.
pub fn supercritical_ratio_decay(w: &WeightSpec, t_grid: &[f64]) -> Result<Vec<f64>> {
    let cr = WeightSpec::critical(w.d);
    let probe = [1e-2, 1e-4, 1e-8].map(|e| w.eval_sq(1.0 - e) / cr.eval_sq(1.0 - e));
    if !(probe[0] < probe[1] && probe[1] < probe[2]) || matches!(w.kind, WeightKind::Critical) {
        return Err(KernelError::Contract(format!("weight {} is not super-critical", w.id())));
    }
    let t_max = t_grid.iter().cloned().fold(0.0f64, f64::max);
    if !(t_max < 1.0) {
        return Err(KernelError::Range { value: t_max, max: 1.0 });
    }
    let rho = t_max * t_max;
    let kw = KernelCoeffs::for_range(w, rho, DEFAULT_TAIL_TOL)?;
    let kc = KernelCoeffs::for_range(&cr, rho, DEFAULT_TAIL_TOL)?;
    t_grid
        .iter()
        .map(|&t| Ok(kw.eval_diag(t * t)?.value / kc.eval_diag(t * t)?.value))
        .collect()
}
