use std::fmt::Write as _;

use psdpp_hypgeom::{Point, C64};

use crate::{KernelError, Result, WeightSpec};

/// `C(n + d - 1, d - 1)`, the number of multi-indices of degree `n` in `d`
/// variables weighted by the sphere factor.
pub fn degree_multiplicity(n: f64, d: usize) -> f64 {
    (1..d).fold(1.0, |acc, i| acc * (n + i as f64) / i as f64)
}

/// Coefficients of a radial-weight Bergman kernel
/// `K_W(z, w) = Σ_n a_n ⟨z, w⟩^n`.
///
/// For `d ≥ 2` the sphere factor is folded into the per-degree scalar, so
/// `a_n = C(n+d-1, n) / (d · m_{n+d-1})` with `m_μ` the radial moment of `W`.
#[derive(Debug, Clone)]
pub struct KernelCoeffs {
    pub d: usize,
    pub weight_id: String,
    pub coeffs: Vec<f64>,
    pub rho_max: f64,
    weight: Option<WeightSpec>,
}

/// A series value with a rigorous bound on the dropped tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue<T> {
    pub value: T,
    pub tail_bound: f64,
}

/// Tail bound used when choosing the truncation for a requested range.
pub const DEFAULT_TAIL_TOL: f64 = 1e-9;

impl KernelCoeffs {
    /// Coefficients `a_0..=a_N` of the weight `w`.
    pub fn compute(w: &WeightSpec, n_max: usize, rho_max: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&rho_max) {
            return Err(KernelError::Argument(format!("ρ_max must lie in [0, 1), got {rho_max}")));
        }
        let coeffs = (0..=n_max)
            .map(|n| coefficient(w, n as f64))
            .collect::<Result<Vec<f64>>>()?;
        Ok(KernelCoeffs {
            d: w.d,
            weight_id: w.id(),
            coeffs,
            rho_max,
            weight: Some(w.clone()),
        })
    }

    /// Coefficients whose certified tail at `|z||w| = rho` is below `tol`.
    ///
    /// Starts at `N = 64` and doubles.
    pub fn for_range(w: &WeightSpec, rho: f64, tol: f64) -> Result<Self> {
        let mut k = Self::compute(w, 64, rho)?;
        loop {
            let t = k.tail_bound(rho);
            if t < tol {
                return Ok(k);
            }
            let n = k.coeffs.len() - 1;
            if n >= 1 << 20 {
                return Err(KernelError::Range { value: rho, max: rho });
            }
            let extra = (n + 1..=2 * n)
                .map(|m| coefficient(w, m as f64))
                .collect::<Result<Vec<f64>>>()?;
            k.coeffs.extend(extra);
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn weight(&self) -> Option<&WeightSpec> {
        self.weight.as_ref()
    }

    /// Bound on `Σ_{n > N} a_n x^n` for `0 ≤ x < 1`.
    ///
    /// Radial moments are log-convex, so `(a_n / C_n)` grows at most by the
    /// factor `q` observed between the last two stored coefficients; the
    /// resulting majorant series is summed until its term ratio drops below
    /// one and the remainder is bounded geometrically.
    pub fn tail_bound(&self, x: f64) -> f64 {
        let n = self.coeffs.len() - 1;
        if x <= 0.0 {
            return 0.0;
        }
        if n == 0 {
            return f64::INFINITY;
        }
        let d = self.d;
        let nf = n as f64;
        let c_n = degree_multiplicity(nf, d);
        let c_prev = degree_multiplicity(nf - 1.0, d);
        let q = (self.coeffs[n] / c_n) / (self.coeffs[n - 1] / c_prev);
        let y = x * q;
        if y >= 1.0 {
            return f64::INFINITY;
        }
        let ln_base = (self.coeffs[n] / c_n).ln() + nf * x.ln();
        // Σ_{j≥1} C_{N+j} y^j, normalised by C_N.
        let mut sum = 0.0;
        let mut term = 1.0;
        for j in 1..10_000_000u64 {
            let cj = degree_multiplicity(nf + j as f64, d) / degree_multiplicity(nf + j as f64 - 1.0, d);
            term *= cj * y;
            sum += term;
            let r = degree_multiplicity(nf + j as f64 + 1.0, d) / degree_multiplicity(nf + j as f64, d) * y;
            if r < 1.0 && term * r / (1.0 - r) < 1e-3 * sum {
                sum += term * r / (1.0 - r);
                break;
            }
        }
        (ln_base + (c_n * sum).ln()).exp()
    }

    fn check_range(&self, x: f64) -> Result<()> {
        if x > self.rho_max * (1.0 + 1e-14) {
            return Err(KernelError::Range {
                value: x,
                max: self.rho_max,
            });
        }
        Ok(())
    }

    /// `Σ a_n x^n` for complex `x = ⟨z, w⟩`, with the tail bound at `|x|`.
    pub fn eval_inner(&self, x: C64) -> Result<SeriesValue<C64>> {
        self.check_range(x.norm())?;
        let value = self
            .coeffs
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, &a| acc * x + a);
        Ok(SeriesValue {
            value,
            tail_bound: self.tail_bound(x.norm()),
        })
    }

    /// Diagonal `K_W(z, z)` as a function of `|z|²`.
    pub fn eval_diag(&self, t: f64) -> Result<SeriesValue<f64>> {
        self.check_range(t)?;
        let value = self.coeffs.iter().rev().fold(0.0, |acc, &a| acc * t + a);
        Ok(SeriesValue {
            value,
            tail_bound: self.tail_bound(t),
        })
    }

    /// Text table: a header line then one `n,a_n` row per coefficient.
    pub fn to_table(&self) -> String {
        let mut s = format!(
            "# weight={} d={} N={} rho_max={:.17e}\n",
            self.weight_id,
            self.d,
            self.degree(),
            self.rho_max
        );
        for (n, a) in self.coeffs.iter().enumerate() {
            let _ = writeln!(s, "{n},{a:.16e}");
        }
        s
    }

    pub fn from_table(text: &str) -> Result<Self> {
        let bad = |m: &str| KernelError::Parse(m.to_string());
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| bad("empty table"))?;
        let header = header.strip_prefix("# ").ok_or_else(|| bad("missing header"))?;
        let (mut id, mut d, mut n, mut rho) = (None, None, None, None);
        for field in header.split_whitespace() {
            let (k, v) = field.split_once('=').ok_or_else(|| bad(field))?;
            match k {
                "weight" => id = Some(v.to_string()),
                "d" => d = v.parse::<usize>().ok(),
                "N" => n = v.parse::<usize>().ok(),
                "rho_max" => rho = v.parse::<f64>().ok(),
                _ => return Err(bad(&format!("unknown header key {k}"))),
            }
        }
        let (id, d, n, rho) = match (id, d, n, rho) {
            (Some(a), Some(b), Some(c), Some(e)) => (a, b, c, e),
            _ => return Err(bad("incomplete header")),
        };
        let mut coeffs = Vec::with_capacity(n + 1);
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let (i, a) = line.split_once(',').ok_or_else(|| bad(line))?;
            let i: usize = i.trim().parse().map_err(|_| bad(line))?;
            if i != coeffs.len() {
                return Err(bad(&format!("row {i} out of order")));
            }
            coeffs.push(a.trim().parse::<f64>().map_err(|_| bad(line))?);
        }
        if coeffs.len() != n + 1 {
            return Err(bad(&format!("expected {} rows, found {}", n + 1, coeffs.len())));
        }
        let weight = WeightSpec::from_id(&id, d);
        Ok(KernelCoeffs {
            d,
            weight_id: id,
            coeffs,
            rho_max: rho,
            weight,
        })
    }
}

/// `a_ν = C(ν+d-1, ν) / (d · m_{ν+d-1})`, also for real `ν`.
pub(crate) fn coefficient(w: &WeightSpec, nu: f64) -> Result<f64> {
    let d = w.d;
    let m = w.moment(nu + d as f64 - 1.0)?;
    Ok(degree_multiplicity(nu, d) / (d as f64 * m))
}

/// Unweighted Bergman kernel `1/(1 - ⟨z, w⟩)^{d+1}`.
pub fn bergman_kernel(z: &Point, w: &Point) -> Result<C64> {
    if z.dim() != w.dim() {
        return Err(psdpp_hypgeom::GeomError::DimensionMismatch(z.dim(), w.dim()).into());
    }
    let one = C64::new(1.0, 0.0);
    Ok((one - z.dot(w)).powi(-(z.dim() as i32 + 1)))
}

/// `radial_weight_coeffs` in the operation catalogue.
pub fn radial_weight_coeffs(w: &WeightSpec, n_max: usize, rho_max: f64) -> Result<KernelCoeffs> {
    KernelCoeffs::compute(w, n_max, rho_max)
}

/// `K_W(z, w)` from stored coefficients with a certified tail.
pub fn weighted_kernel_eval(k: &KernelCoeffs, z: &Point, w: &Point) -> Result<SeriesValue<C64>> {
    if z.dim() != w.dim() || z.dim() != k.d {
        return Err(psdpp_hypgeom::GeomError::DimensionMismatch(z.dim(), w.dim()).into());
    }
    if z.norm() * w.norm() > k.rho_max * (1.0 + 1e-14) {
        return Err(KernelError::Range {
            value: z.norm() * w.norm(),
            max: k.rho_max,
        });
    }
    k.eval_inner(z.dot(w))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_coefficients_exact() {
        let k = KernelCoeffs::compute(&WeightSpec::unit(1), 50, 0.9).unwrap();
        for (n, a) in k.coeffs.iter().enumerate() {
            assert!((a - (n as f64 + 1.0)).abs() < 1e-12 * (n as f64 + 1.0));
        }
        let k3 = KernelCoeffs::compute(&WeightSpec::unit(3), 10, 0.9).unwrap();
        // 1/(1-x)^4 = Σ C(n+3, 3) x^n
        assert!((k3.coeffs[2] - 10.0).abs() < 1e-12);
    }

    #[test]
    fn table_round_trip() {
        let k = KernelCoeffs::compute(&WeightSpec::critical(2), 20, 0.5).unwrap();
        let back = KernelCoeffs::from_table(&k.to_table()).unwrap();
        assert_eq!(back.coeffs, k.coeffs);
        assert_eq!(back.rho_max, k.rho_max);
        assert_eq!(back.weight_id, "critical");
        assert!(back.weight().is_some());
        assert!(KernelCoeffs::from_table("# weight=unit d=1 N=3 rho_max=0.5\n0,1\n").is_err());
    }

    #[test]
    fn tail_bound_is_rigorous_for_unit() {
        let k = KernelCoeffs::compute(&WeightSpec::unit(1), 100, 0.9).unwrap();
        for &x in &[0.5f64, 0.8, 0.9] {
            // Σ_{n>N} (n+1) x^n in closed form.
            let n = 100.0;
            let exact_tail = x.powf(n + 1.0) * ((n + 2.0) - (n + 1.0) * x) / ((1.0 - x) * (1.0 - x));
            let b = k.tail_bound(x);
            assert!(b >= exact_tail * (1.0 - 1e-9), "x={x}: {b} < {exact_tail}");
            assert!(b < 10.0 * exact_tail + 1e-12);
        }
    }

    #[test]
    fn range_error() {
        let k = KernelCoeffs::compute(&WeightSpec::unit(1), 10, 0.5).unwrap();
        let z = Point::disk(0.9, 0.0).unwrap();
        assert!(matches!(weighted_kernel_eval(&k, &z, &z), Err(KernelError::Range { .. })));
    }
}
