use std::sync::Arc;

use psdpp_hypgeom::{poisson_kernel, BoundaryPoint, Point, C64};
use psdpp_kernels::{bergman_kernel, weighted_kernel_eval, KernelCoeffs, WeightKind};

use crate::{PsError, Result};

/// Target space of a vector-valued test function.
#[derive(Debug, Clone)]
pub enum RkhsSpace {
    /// `A²(W)`, with `F(x) = K_W(·, x)`.
    Kernel(KernelCoeffs),
    /// `L²(μ)` for `μ = Σ w_j δ_{ζ_j}`, with `F(x) = P(x, ·)`.
    Hardy {
        atoms: Vec<BoundaryPoint>,
        weights: Vec<f64>,
    },
}

pub(crate) fn is_unit(k: &KernelCoeffs) -> bool {
    matches!(k.weight().map(|w| &w.kind), Some(WeightKind::Unit))
}

/// `K_W(x, y)`, in closed form for `W ≡ 1`.
pub(crate) fn kernel_value(k: &KernelCoeffs, x: &Point, y: &Point) -> Result<C64> {
    if is_unit(k) {
        return Ok(bergman_kernel(x, y)?);
    }
    Ok(weighted_kernel_eval(k, x, y)?.value)
}

impl RkhsSpace {
    pub fn dim(&self) -> usize {
        match self {
            RkhsSpace::Kernel(k) => k.d,
            RkhsSpace::Hardy { atoms, .. } => atoms[0].dim(),
        }
    }

    /// `⟨F(x), F(y)⟩`.
    pub fn inner(&self, x: &Point, y: &Point) -> Result<C64> {
        match self {
            RkhsSpace::Kernel(k) => kernel_value(k, y, x),
            RkhsSpace::Hardy { atoms, weights } => {
                let mut s = 0.0;
                for (a, w) in atoms.iter().zip(weights) {
                    s += w * poisson_kernel(x, a)? * poisson_kernel(y, a)?;
                }
                Ok(C64::new(s, 0.0))
            }
        }
    }
}

/// A finite combination `Σ c_i F(x_i)`.
#[derive(Debug, Clone)]
pub struct SectionRecord {
    space: Arc<RkhsSpace>,
    terms: Vec<(Point, C64)>,
}

impl SectionRecord {
    pub fn new(space: Arc<RkhsSpace>) -> Self {
        SectionRecord {
            space,
            terms: Vec::new(),
        }
    }

    pub fn space(&self) -> &Arc<RkhsSpace> {
        &self.space
    }

    pub fn terms(&self) -> &[(Point, C64)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn push(&mut self, x: Point, c: C64) {
        self.terms.push((x, c));
    }

    pub fn scaled(&self, c: C64) -> Self {
        SectionRecord {
            space: self.space.clone(),
            terms: self.terms.iter().map(|(x, a)| (x.clone(), a * c)).collect(),
        }
    }

    /// `self - other`; both must live in the same space.
    pub fn sub(&self, other: &SectionRecord) -> Result<Self> {
        if !Arc::ptr_eq(&self.space, &other.space) {
            return Err(PsError::Contract("records from different spaces".into()));
        }
        let mut out = self.clone();
        out.terms
            .extend(other.terms.iter().map(|(x, c)| (x.clone(), -c)));
        Ok(out)
    }

    /// `Σ_i c_i ⟨F(x_i), v⟩` for `v = Σ_j d_j F(y_j)`.
    pub fn inner(&self, other: &SectionRecord) -> Result<C64> {
        let mut s = C64::new(0.0, 0.0);
        for (x, c) in &self.terms {
            for (y, e) in &other.terms {
                s += c * e.conj() * self.space.inner(x, y)?;
            }
        }
        Ok(s)
    }

    /// `‖Σ c_i F(x_i)‖²`.
    ///
    /// Kernel records use `Σ_{ij} c_i c̄_j K(x_j, x_i)`; Hardy records sum
    /// `w_j |Σ_i c_i P(x_i, ζ_j)|²` over the atoms.
    pub fn norm_sqr(&self) -> Result<f64> {
        let v = match self.space.as_ref() {
            RkhsSpace::Kernel(_) => self.inner(self)?.re,
            RkhsSpace::Hardy { atoms, weights } => {
                let mut s = 0.0;
                for (a, w) in atoms.iter().zip(weights) {
                    let mut v = C64::new(0.0, 0.0);
                    for (x, c) in &self.terms {
                        v += c * poisson_kernel(x, a)?;
                    }
                    s += w * v.norm_sqr();
                }
                s
            }
        };
        Ok(v.max(0.0))
    }

    pub fn norm(&self) -> Result<f64> {
        Ok(self.norm_sqr()?.sqrt())
    }

    /// Gram matrix `G_{ij} = ⟨F(x_j), F(x_i)⟩` of the record's points.
    pub fn gram_matrix(&self) -> Result<Vec<Vec<C64>>> {
        self.terms
            .iter()
            .map(|(xi, _)| {
                self.terms
                    .iter()
                    .map(|(xj, _)| self.space.inner(xj, xi))
                    .collect::<Result<Vec<C64>>>()
            })
            .collect()
    }
}

/// A scalar sum or a vector-valued record.
#[derive(Debug, Clone)]
pub enum Statistic {
    Scalar(C64),
    Record(SectionRecord),
}

impl Statistic {
    pub fn scalar(&self) -> Option<C64> {
        match self {
            Statistic::Scalar(v) => Some(*v),
            Statistic::Record(_) => None,
        }
    }

    pub fn record(&self) -> Option<&SectionRecord> {
        match self {
            Statistic::Record(r) => Some(r),
            Statistic::Scalar(_) => None,
        }
    }

    /// `|v|` or `‖v‖`.
    pub fn magnitude(&self) -> Result<f64> {
        match self {
            Statistic::Scalar(v) => Ok(v.norm()),
            Statistic::Record(r) => r.norm(),
        }
    }

    pub(crate) fn divided(&self, c: f64) -> Statistic {
        match self {
            Statistic::Scalar(v) => Statistic::Scalar(v / c),
            Statistic::Record(r) => Statistic::Record(SectionRecord {
                space: r.space.clone(),
                terms: r.terms.iter().map(|(x, a)| (x.clone(), a / c)).collect(),
            }),
        }
    }
}
