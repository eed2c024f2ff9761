//! One-dimensional numerical integration and interpolation.
//!
//! [`integrate`] is a globally adaptive 21-point Gauss–Kronrod scheme in the
//! style of QUADPACK's `qag`; nested use gives the tensorised double
//! integrals used elsewhere in the workspace. [`Chebyshev`] provides piecewise
//! polynomial surrogates for expensive smooth functions.

mod cheb;
mod gk;

pub use cheb::Chebyshev;
pub use gk::{integrate, integrate_breaks, integrate_to_inf, Integral, Tolerance};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuadError {
    #[error("quadrature did not converge on [{a}, {b}]: value {value:e}, error {error:e} after {intervals} intervals")]
    NotConverged {
        a: f64,
        b: f64,
        value: f64,
        error: f64,
        intervals: usize,
    },
    #[error("non-finite integrand value at x = {x}")]
    NonFinite { x: f64 },
}
