//! Configurations of the Bergman-kernel determinantal point process.
//!
//! Two generators are provided. [`sample_gaf`] returns the zeros of the
//! hyperbolic Gaussian analytic function `Σ ξ_n z^n` (`d = 1`), whose zero
//! set is the determinantal process of the disk Bergman kernel.
//! [`sample_hkpv`] runs the sequential projection sampler on normalised
//! monomials in any dimension. [`validate_statistics`] compares a batch of
//! configurations with the analytic first and second order statistics.

mod archive;
mod gaf;
mod hkpv;
pub mod roots;
mod stats;

pub use gaf::{gaf_coefficients, sample_gaf, GafSpec};
pub use hkpv::{default_degree_cutoff, sample_hkpv, HkpvMode, HkpvSpec};
pub use stats::{
    count_mean, count_variance, pair_ratio_theory, validate_statistics, PairBin, RadiusStats, StatsReport,
};

use std::fmt;
use std::str::FromStr;

use psdpp_hypgeom::{GeomError, Point};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SamplerError {
    #[error(transparent)]
    Geometry(#[from] GeomError),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("truncation margin test failed at degree {degree} after {attempts} attempts (tail/min ratio {ratio:e})")]
    Margin { degree: usize, attempts: u32, ratio: f64 },
    #[error("sequential sampler broke down after {retries} retries: {reason}")]
    Breakdown { retries: u32, reason: String },
    #[error("malformed archive: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, SamplerError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Generator {
    Gaf,
    Hkpv,
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Generator::Gaf => "gaf",
            Generator::Hkpv => "hkpv",
        })
    }
}

impl FromStr for Generator {
    type Err = SamplerError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaf" => Ok(Generator::Gaf),
            "hkpv" => Ok(Generator::Hkpv),
            _ => Err(SamplerError::Argument(format!("unknown generator {s}"))),
        }
    }
}

/// Generator-specific bookkeeping attached to a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TruncationMeta {
    /// Polynomial degree (GAF) or largest basis degree (HKPV).
    pub degree: usize,
    /// GAF: `6σ_tail / min|S_N|` on the window circle. HKPV: the kernel
    /// mass left out of the basis.
    pub tail_margin: f64,
    /// Number of accepted draws (GAF attempts, HKPV proposals).
    pub accepted: u64,
    pub rejected: u64,
}

/// A finite configuration representing the process on `B(o, R)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    pub points: Vec<Point>,
    pub window_radius: f64,
    pub seed: u64,
    pub generator: Generator,
    pub d: usize,
    pub meta: TruncationMeta,
}

impl Configuration {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Number of points with `|z| < t`.
    pub fn count_euclidean(&self, t: f64) -> usize {
        let t2 = t * t;
        self.points.iter().filter(|p| p.norm_sqr() < t2).count()
    }

    /// Number of points in the hyperbolic ball `B(o, r)`.
    pub fn count_in_ball(&self, r: f64) -> usize {
        self.count_euclidean(psdpp_hypgeom::disk::euclidean_radius(r))
    }

    /// `d = 1` points as complex numbers.
    pub fn disk_points(&self) -> Vec<psdpp_hypgeom::C64> {
        self.points.iter().map(|p| p.coords()[0]).collect()
    }

    pub fn to_archive(&self) -> String {
        archive::write(self)
    }

    pub fn from_archive(text: &str) -> Result<Self> {
        archive::read(text)
    }

    /// Checks the configuration invariants: points strictly inside the
    /// window, common dimension, pairwise separation above `1e-12`.
    pub fn check_invariants(&self) -> Result<()> {
        let rho = psdpp_hypgeom::disk::euclidean_radius(self.window_radius);
        for p in &self.points {
            if p.dim() != self.d {
                return Err(GeomError::DimensionMismatch(p.dim(), self.d).into());
            }
            if !(p.norm() < rho) {
                return Err(SamplerError::Argument(format!("point at |z| = {} outside the window", p.norm())));
            }
        }
        let mut min = f64::INFINITY;
        for (i, p) in self.points.iter().enumerate() {
            for q in &self.points[..i] {
                let dist: f64 = p.coords().iter().zip(q.coords()).map(|(a, b)| (a - b).norm_sqr()).sum();
                min = min.min(dist.sqrt());
            }
        }
        if min <= 1e-12 {
            return Err(SamplerError::Argument(format!("points closer than 1e-12 ({min:e})")));
        }
        Ok(())
    }
}

/// The random stream of `(seed, attempt)`.
pub fn stream(seed: u64, attempt: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(attempt);
    rng
}

fn window_rho(r: f64) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(SamplerError::Argument(format!("window radius must be positive, got {r}")));
    }
    Ok(psdpp_hypgeom::disk::euclidean_radius(r))
}
