//! Patterson–Sullivan interpolation on configurations of the Bergman DPP.
//!
//! A configuration `X` and an exponent `s > d` give the Poincaré series
//! `g_X(s, z) = Σ_x e^{-s d_B(x, z)}` and, for a test function `f`, the
//! weighted sum `g_X(s, z; f)`. Their ratio recovers `f(z)` as `s ↓ d` for
//! the function classes in [`TestFunction`]. Kernel-valued functions are
//! carried as exact coefficient records ([`SectionRecord`]).

mod function;
mod gram;
mod growth;
mod record;
mod series;

pub use function::{default_lacunary_terms, FunctionKind, TestFunction};
pub use gram::{gram_schmidt_baseline, GramSchmidt};
pub use growth::{mean_growth_profile, tempered_functional, weighted_square_integral};
pub use record::{RkhsSpace, SectionRecord, Statistic};
pub use series::{
    harmonic_measure_moments, poincare_series, poincare_tail_bound, ps_generalized, ps_ratio, ps_weighted_sum,
    tail_bound, AnnularBlock, GeneralizedSum, PSEstimate, PoincareSum, RatioResult, CSV_HEADER,
};

use psdpp_hypgeom::GeomError;
use psdpp_kernels::KernelError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PsError {
    #[error(transparent)]
    Geometry(#[from] GeomError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("profile support {support} exceeds the window (room {room})")]
    Window { support: f64, room: f64 },
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("Gram matrix ill-conditioned at term {pivot} (condition estimate {condition:e})")]
    Conditioning { pivot: usize, condition: f64 },
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("invalid argument: {0}")]
    Argument(String),
}

pub type Result<T> = std::result::Result<T, PsError>;

impl From<psdpp_quad::QuadError> for PsError {
    fn from(e: psdpp_quad::QuadError) -> Self {
        PsError::Numeric(e.to_string())
    }
}
