use psdpp_hypgeom::{Point, C64};
use psdpp_kernels::KernelCoeffs;

use crate::record::kernel_value;
use crate::{PsError, Result};

/// Smallest admissible `L_nn² / G_nn` in the Cholesky factorisation.
const PIVOT_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GramSchmidt {
    pub value: C64,
    /// `(max L_nn / min L_nn)²`, a lower estimate of the Gram condition number.
    pub condition: f64,
    pub terms: usize,
}

/// Reconstruction `Σ_{n<N} φ_n(z)⟨f, φ_n⟩` from the Gram–Schmidt basis of
/// `K_W(·, x_1), …, K_W(·, x_N)`, using only `f(x_k) = ⟨f, K_W(·, x_k)⟩`.
///
/// Gram–Schmidt in the given order is the Cholesky factorisation
/// `H = LL*` of `H_{ij} = ⟨K(·,x_i), K(·,x_j)⟩ = K(x_j, x_i)`, and the sum
/// equals `(L^{-1}k_z)ᵀ conj(L^{-1} f̄)` with `(k_z)_j = K(z, x_j)`.
pub fn gram_schmidt_baseline(
    points: &[Point],
    f_values: &[C64],
    w: &KernelCoeffs,
    z: &Point,
    n_terms: usize,
) -> Result<GramSchmidt> {
    if points.len() != f_values.len() {
        return Err(PsError::Argument("one value per point is required".into()));
    }
    if n_terms == 0 || n_terms > points.len() {
        return Err(PsError::Argument(format!(
            "n_terms = {n_terms} must lie in 1..={}",
            points.len()
        )));
    }
    let n = n_terms;
    let pts = &points[..n];
    let mut l = vec![vec![C64::new(0.0, 0.0); n]; n];
    let (mut pmax, mut pmin) = (0f64, f64::INFINITY);
    for i in 0..n {
        for j in 0..=i {
            let mut v = kernel_value(w, &pts[j], &pts[i])?;
            for k in 0..j {
                v -= l[i][k] * l[j][k].conj();
            }
            if i == j {
                let diag = kernel_value(w, &pts[i], &pts[i])?.re;
                let p = v.re;
                if !(p > PIVOT_FLOOR * diag) {
                    let condition = if p > 0.0 { pmax.max(p) / p } else { f64::INFINITY };
                    return Err(PsError::Conditioning { pivot: i, condition });
                }
                pmax = pmax.max(p);
                pmin = pmin.min(p);
                l[i][i] = C64::new(p.sqrt(), 0.0);
            } else {
                l[i][j] = v / l[j][j];
            }
        }
    }
    let solve = |b: Vec<C64>| {
        let mut y = b;
        for i in 0..n {
            let mut v = y[i];
            for k in 0..i {
                v -= l[i][k] * y[k];
            }
            y[i] = v / l[i][i];
        }
        y
    };
    let kz = pts
        .iter()
        .map(|x| kernel_value(w, z, x))
        .collect::<Result<Vec<C64>>>()?;
    let a = solve(kz);
    let b = solve(f_values[..n].iter().map(|v| v.conj()).collect());
    let value = a.iter().zip(&b).map(|(p, q)| p * q.conj()).sum();
    Ok(GramSchmidt {
        value,
        condition: pmax / pmin,
        terms: n,
    })
}
