//! Variance oracles for linear statistics of the disk Bergman process.
//!
//! Every double integral over `D × D` is reduced analytically to the radial
//! variables before quadrature: the angular average of the kernel factor is
//! either a closed form (`|K_D|²`, `I_z`) or the series [`DsharpSeries`] of a
//! weighted kernel. The radial integrals run in `v = -ln(1 - |x|²)`, where the
//! Poincaré weight `e^{-s d_B}` is `e^{-s v}` up to a bounded factor and
//! near-critical exponents stay in range.
//!
//! [`var_mc`] is the empirical counterpart, with delete-one jackknife errors.
//!
//! [`DsharpSeries`]: psdpp_kernels::DsharpSeries

mod bounds;
mod iz;
mod mc;
mod quadrature;
mod radial;
mod report;

pub use bounds::{
    claim_a_uv, pluri_inner_sum, pluri_ratio_bound, pluri_ratio_limit, sharp_divergence_bound, sharp_functional,
    ClaimA, InnerSum,
};
pub use iz::{identity_iz, identity_iz_angular, impossibility_ratio, iz_polynomial, residue_jz_check};
pub use mc::{jackknife_variance, var_mc, var_mc_configs, McStatistic, SamplerSpec};
pub use quadrature::{var_kernel_weighted, var_scalar_quadrature};
pub use radial::Radial;
pub use report::{Method, VarianceReport, REPORT_HEADER};

use psdpp_hypgeom::GeomError;
use psdpp_kernels::KernelError;
use psdpp_psinterp::PsError;
use psdpp_sampler::SamplerError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VarError {
    #[error(transparent)]
    Geometry(#[from] GeomError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Interp(#[from] PsError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, VarError>;

impl From<psdpp_quad::QuadError> for VarError {
    fn from(e: psdpp_quad::QuadError) -> Self {
        VarError::Numeric(e.to_string())
    }
}
