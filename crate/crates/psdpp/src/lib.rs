//! Experiment driver for Patterson–Sullivan interpolation on samples of the
//! Bergman determinantal point process.
//!
//! Each named [`Experiment`] reads an [`ExperimentConfig`], writes versioned
//! CSV tables and records its acceptance criteria in `manifest.json` under
//! the output directory. [`report`] folds the manifest into a pass/fail
//! summary over all criteria.
//!
//! The numerical crates are re-exported under short names.

pub use psdpp_hypgeom as hypgeom;
pub use psdpp_kernels as kernels;
pub use psdpp_psinterp as psinterp;
pub use psdpp_sampler as sampler;
pub use psdpp_variance as variance;

pub mod config;
pub mod experiment;
pub mod output;
mod parallel;

use std::path::{Path, PathBuf};

pub use config::{parse_seeds, ExperimentConfig, FunctionSpec, SamplerKind, WeightChoice};
pub use experiment::{load_configurations, run, Experiment, Outcome, Subcommand};
pub use output::{
    read_manifest, report, write_archives, write_outcome, CriterionResult, Report, Status, Table, CRITERIA,
    CSV_VERSION,
};
pub use parallel::par_map;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Geometry(#[from] psdpp_hypgeom::GeomError),
    #[error(transparent)]
    Kernel(#[from] psdpp_kernels::KernelError),
    #[error(transparent)]
    Sampler(#[from] psdpp_sampler::SamplerError),
    #[error(transparent)]
    Interp(#[from] psdpp_psinterp::PsError),
    #[error(transparent)]
    Variance(#[from] psdpp_variance::VarError),
    #[error("{}: malformed JSON: {source}", path.display())]
    Json { path: PathBuf, source: serde_json::Error },
}

impl Error {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
