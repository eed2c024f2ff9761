//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # comments start with '#'
//! experiment = hardy
//! d = 1
//! s_grid = 1.5, 1.3, 1.2, 1.1, 1.05
//! z_grid = 0, 0.4
//! functions = hardy:0
//! sampler = hkpv
//! window = 6
//! n_configurations = 50
//! seed_base = 0
//! out = out
//! ```
//!
//! Unknown keys are an error. A file only needs `experiment`; every other key
//! defaults to the experiment's preset.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use psdpp_hypgeom::{BoundaryPoint, Point, C64};
use psdpp_kernels::{KernelCoeffs, WeightSpec};
use psdpp_psinterp::TestFunction;
use psdpp_sampler::{GafSpec, HkpvMode, HkpvSpec};
use psdpp_variance::SamplerSpec;
use sha2::{Digest, Sha256};

use crate::experiment::Experiment;
use crate::{Error, Result};

/// Environment variable for the default output directory.
pub const OUT_ENV: &str = "PSDPP_OUT";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplerKind {
    Gaf,
    Hkpv,
    HkpvTruncated,
}

impl SamplerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SamplerKind::Gaf => "gaf",
            SamplerKind::Hkpv => "hkpv",
            SamplerKind::HkpvTruncated => "hkpv-truncated",
        }
    }
}

impl FromStr for SamplerKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaf" => Ok(SamplerKind::Gaf),
            "hkpv" => Ok(SamplerKind::Hkpv),
            "hkpv-truncated" => Ok(SamplerKind::HkpvTruncated),
            _ => Err(Error::Config(format!("unknown sampler {s:?}"))),
        }
    }
}

/// A test function named in a config file.
///
/// `one`, `re`, `monomial:n`, `poisson:θ`, `lacunary`, `hardy:θ`,
/// `kernel:unit`, `kernel:critical`, `kernel:super:γ` and `pluri` (the
/// `d = 2` function `Re z₁ + Im(z₁z₂)`).
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionSpec {
    One,
    Re,
    Monomial(u32),
    Poisson(f64),
    Lacunary,
    Hardy(f64),
    Kernel(WeightChoice),
    Pluri,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightChoice {
    Unit,
    Critical,
    Super(f64),
}

impl WeightChoice {
    pub fn spec(self) -> Result<WeightSpec> {
        Ok(match self {
            WeightChoice::Unit => WeightSpec::unit(1),
            WeightChoice::Critical => WeightSpec::critical(1),
            WeightChoice::Super(g) => WeightSpec::supercritical(g, 1)?,
        })
    }
}

impl FunctionSpec {
    /// The test function on `D_d`. Kernel sections get coefficients valid
    /// for `|x||y| ≤ rho`.
    pub fn build(&self, d: usize, rho: f64) -> Result<TestFunction> {
        let need_disk = |name: &str| {
            if d == 1 {
                Ok(())
            } else {
                Err(Error::Config(format!("function {name} is defined on the disk only")))
            }
        };
        Ok(match self {
            FunctionSpec::One => TestFunction::one(d),
            FunctionSpec::Re => TestFunction::real_part(d),
            FunctionSpec::Monomial(n) => {
                let mut alpha = vec![0; d];
                alpha[0] = *n;
                TestFunction::monomial_multi(alpha)?
            }
            FunctionSpec::Poisson(t) => {
                need_disk("poisson")?;
                TestFunction::poisson(*t)
            }
            FunctionSpec::Lacunary => {
                need_disk("lacunary")?;
                TestFunction::lacunary()
            }
            FunctionSpec::Hardy(t) => {
                need_disk("hardy")?;
                TestFunction::hardy_atomic(vec![BoundaryPoint::circle(*t)], vec![1.0], vec![C64::new(1.0, 0.0)])?
            }
            FunctionSpec::Kernel(w) => {
                need_disk("kernel")?;
                TestFunction::kernel_section(KernelCoeffs::for_range(&w.spec()?, rho, 1e-9)?)
            }
            FunctionSpec::Pluri => {
                if d != 2 {
                    return Err(Error::Config("pluri is defined for d = 2".into()));
                }
                let half = C64::new(0.5, 0.0);
                let i_half = C64::new(0.0, 0.5);
                TestFunction::pluriharmonic(
                    2,
                    vec![(vec![1, 0], half), (vec![1, 1], -i_half)],
                    vec![(vec![1, 0], half), (vec![1, 1], i_half)],
                )?
            }
        })
    }
}

impl FromStr for FunctionSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split(':');
        let head = parts.next().unwrap_or_default();
        let rest: Vec<&str> = parts.collect();
        let num = |i: usize| -> Result<f64> {
            rest.get(i)
                .ok_or_else(|| Error::Config(format!("function {s:?} needs an argument")))?
                .parse()
                .map_err(|_| Error::Config(format!("bad number in function {s:?}")))
        };
        Ok(match head {
            "one" => FunctionSpec::One,
            "re" => FunctionSpec::Re,
            "monomial" => FunctionSpec::Monomial(num(0)? as u32),
            "poisson" => FunctionSpec::Poisson(num(0)?),
            "lacunary" => FunctionSpec::Lacunary,
            "hardy" => FunctionSpec::Hardy(num(0)?),
            "pluri" => FunctionSpec::Pluri,
            "kernel" => FunctionSpec::Kernel(match rest.first().copied() {
                Some("unit") | None => WeightChoice::Unit,
                Some("critical") => WeightChoice::Critical,
                Some("super") => WeightChoice::Super(num(1)?),
                Some(w) => return Err(Error::Config(format!("unknown weight {w:?}"))),
            }),
            _ => return Err(Error::Config(format!("unknown function {s:?}"))),
        })
    }
}

impl std::fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FunctionSpec::One => write!(f, "one"),
            FunctionSpec::Re => write!(f, "re"),
            FunctionSpec::Monomial(n) => write!(f, "monomial:{n}"),
            FunctionSpec::Poisson(t) => write!(f, "poisson:{t}"),
            FunctionSpec::Lacunary => write!(f, "lacunary"),
            FunctionSpec::Hardy(t) => write!(f, "hardy:{t}"),
            FunctionSpec::Kernel(WeightChoice::Unit) => write!(f, "kernel:unit"),
            FunctionSpec::Kernel(WeightChoice::Critical) => write!(f, "kernel:critical"),
            FunctionSpec::Kernel(WeightChoice::Super(g)) => write!(f, "kernel:super:{g}"),
            FunctionSpec::Pluri => write!(f, "pluri"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub d: usize,
    pub s_grid: Vec<f64>,
    /// Evaluation points `(x, 0, …, 0)`, `x ∈ (-1, 1)`.
    pub z_grid: Vec<f64>,
    pub functions: Vec<FunctionSpec>,
    pub sampler: SamplerKind,
    pub window: f64,
    pub n_configurations: usize,
    pub seed_base: u64,
    pub out: PathBuf,
    /// Directory of configuration archives to read instead of sampling.
    pub archives: Option<PathBuf>,
}

const KEYS: [&str; 11] = [
    "experiment",
    "d",
    "s_grid",
    "z_grid",
    "functions",
    "sampler",
    "window",
    "n_configurations",
    "seed_base",
    "out",
    "archives",
];

fn list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    v.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse().map_err(|_| Error::Config(format!("bad entry {x:?} in {key}"))))
        .collect()
}

fn scalar<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Config(format!("bad value {v:?} for {key}")))
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or_default().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.contains(&k) {
                return Err(Error::Config(format!("line {}: unknown key {k:?}", i + 1)));
            }
            if pairs.iter().any(|(p, _): &(String, String)| p == k) {
                return Err(Error::Config(format!("line {}: duplicate key {k:?}", i + 1)));
            }
            pairs.push((k.to_string(), v.to_string()));
        }
        let get = |k: &str| pairs.iter().find(|(p, _)| p == k).map(|(_, v)| v.as_str());
        let name = get("experiment").ok_or_else(|| Error::Config("missing key experiment".into()))?;
        let mut c = Experiment::from_str(name)?.preset();
        if let Some(v) = get("d") {
            c.d = scalar("d", v)?;
        }
        if let Some(v) = get("s_grid") {
            c.s_grid = list("s_grid", v)?;
        }
        if let Some(v) = get("z_grid") {
            c.z_grid = list("z_grid", v)?;
        }
        if let Some(v) = get("functions") {
            c.functions = list("functions", v)?;
        }
        if let Some(v) = get("sampler") {
            c.sampler = v.parse()?;
        }
        if let Some(v) = get("window") {
            c.window = scalar("window", v)?;
        }
        if let Some(v) = get("n_configurations") {
            c.n_configurations = scalar("n_configurations", v)?;
        }
        if let Some(v) = get("seed_base") {
            c.seed_base = scalar("seed_base", v)?;
        }
        if let Some(v) = get("out") {
            c.out = PathBuf::from(v);
        }
        if let Some(v) = get("archives") {
            c.archives = Some(PathBuf::from(v));
        }
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.d as f64;
        if self.d == 0 {
            return Err(Error::Config("d must be at least 1".into()));
        }
        if let Some(s) = self.s_grid.iter().find(|&&s| !(s > d && s <= d + 1.0)) {
            return Err(Error::Config(format!("s = {s} outside ({d}, {}]", d + 1.0)));
        }
        if self.n_configurations == 0 {
            return Err(Error::Config("n_configurations must be at least 1".into()));
        }
        if let Some(z) = self.z_grid.iter().find(|z| !(z.abs() < 1.0)) {
            return Err(Error::Config(format!("z = {z} is not in the ball")));
        }
        if !(self.window > 0.0 && self.window.is_finite()) {
            return Err(Error::Config(format!("window radius {} must be positive", self.window)));
        }
        Ok(())
    }

    /// Canonical text: every key in a fixed order, so equal configs hash
    /// equally.
    pub fn canonical(&self) -> String {
        let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        let mut t = String::new();
        let _ = writeln!(t, "experiment = {}", self.experiment.name());
        let _ = writeln!(t, "d = {}", self.d);
        let _ = writeln!(t, "s_grid = {}", join(&self.s_grid));
        let _ = writeln!(t, "z_grid = {}", join(&self.z_grid));
        let f: Vec<String> = self.functions.iter().map(|f| f.to_string()).collect();
        let _ = writeln!(t, "functions = {}", f.join(", "));
        let _ = writeln!(t, "sampler = {}", self.sampler.as_str());
        let _ = writeln!(t, "window = {}", self.window);
        let _ = writeln!(t, "n_configurations = {}", self.n_configurations);
        let _ = writeln!(t, "seed_base = {}", self.seed_base);
        let _ = writeln!(t, "out = {}", self.out.display());
        if let Some(a) = &self.archives {
            let _ = writeln!(t, "archives = {}", a.display());
        }
        t
    }

    /// SHA-256 of [`canonical`](Self::canonical) without the `out` line,
    /// hex encoded.
    pub fn hash(&self) -> String {
        let text: String = self
            .canonical()
            .lines()
            .filter(|l| !l.starts_with("out = "))
            .map(|l| format!("{l}\n"))
            .collect();
        Sha256::digest(text.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn seeds(&self) -> std::ops::Range<u64> {
        self.seed_base..self.seed_base + self.n_configurations as u64
    }

    pub fn sampler_spec(&self) -> SamplerSpec {
        match self.sampler {
            SamplerKind::Gaf => SamplerSpec::Gaf(GafSpec::new(self.window)),
            SamplerKind::Hkpv => SamplerSpec::Hkpv(HkpvSpec::new(self.d, self.window, HkpvMode::Window)),
            SamplerKind::HkpvTruncated => SamplerSpec::Hkpv(HkpvSpec::new(self.d, self.window, HkpvMode::Truncated)),
        }
    }

    pub fn z_points(&self) -> Result<Vec<Point>> {
        self.z_grid
            .iter()
            .map(|&x| {
                let mut c = vec![C64::new(0.0, 0.0); self.d];
                c[0] = C64::new(x, 0.0);
                Ok(Point::new(c)?)
            })
            .collect()
    }
}

/// Parses `a..b` into a seed range.
pub fn parse_seeds(s: &str) -> Result<std::ops::Range<u64>> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| Error::Config(format!("seed range {s:?} is not of the form a..b")))?;
    let a: u64 = scalar("--seeds", a.trim())?;
    let b: u64 = scalar("--seeds", b.trim())?;
    if b <= a {
        return Err(Error::Config(format!("empty seed range {s}")));
    }
    Ok(a..b)
}
