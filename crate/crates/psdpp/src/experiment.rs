//! Named experiments and the acceptance criteria they compute.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use psdpp_hypgeom::{poincare_mass, poincare_mass_disk, Point, C64};
use psdpp_kernels::{critical_claim_integral, KernelCoeffs, RadialProfile, WeightSpec};
use psdpp_psinterp::{ps_weighted_sum, tempered_functional, FunctionKind, RkhsSpace, TestFunction, CSV_HEADER};
use psdpp_sampler::{sample_hkpv, validate_statistics, Configuration, Generator, HkpvMode, HkpvSpec};
use psdpp_variance::{
    claim_a_uv, identity_iz, identity_iz_angular, impossibility_ratio, pluri_ratio_bound, pluri_ratio_limit,
    residue_jz_check, sharp_functional, var_kernel_weighted, var_mc_configs, var_scalar_quadrature, McStatistic,
    Radial, VarianceReport, REPORT_HEADER,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{ExperimentConfig, FunctionSpec, SamplerKind, OUT_ENV};
use crate::output::{CriterionResult, Table};
use crate::{par_map, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    Sample,
    Interpolate,
    Variance,
}

impl Subcommand {
    pub fn as_str(self) -> &'static str {
        match self {
            Subcommand::Sample => "sample",
            Subcommand::Interpolate => "interpolate",
            Subcommand::Variance => "variance",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Intensity,
    Hardy,
    MeanIdentity,
    WBergman,
    Critical,
    TemperedSingle,
    Pluriharmonic,
    PoincareMass,
    CriticalKernel,
    VarianceOracle,
    IzIdentity,
    Impossibility,
    CriticalFloor,
    ClaimA,
    Sharp,
}

impl Experiment {
    pub const ALL: [Experiment; 15] = [
        Experiment::Intensity,
        Experiment::Hardy,
        Experiment::MeanIdentity,
        Experiment::WBergman,
        Experiment::Critical,
        Experiment::TemperedSingle,
        Experiment::Pluriharmonic,
        Experiment::PoincareMass,
        Experiment::CriticalKernel,
        Experiment::VarianceOracle,
        Experiment::IzIdentity,
        Experiment::Impossibility,
        Experiment::CriticalFloor,
        Experiment::ClaimA,
        Experiment::Sharp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Intensity => "intensity",
            Experiment::Hardy => "hardy",
            Experiment::MeanIdentity => "mean-identity",
            Experiment::WBergman => "wbergman",
            Experiment::Critical => "critical",
            Experiment::TemperedSingle => "tempered-single",
            Experiment::Pluriharmonic => "pluriharmonic",
            Experiment::PoincareMass => "poincare-mass",
            Experiment::CriticalKernel => "critical-kernel",
            Experiment::VarianceOracle => "variance-oracle",
            Experiment::IzIdentity => "iz-identity",
            Experiment::Impossibility => "impossibility",
            Experiment::CriticalFloor => "critical-floor",
            Experiment::ClaimA => "claimA",
            Experiment::Sharp => "sharp",
        }
    }

    pub fn subcommand(self) -> Subcommand {
        use Experiment::*;
        match self {
            Intensity => Subcommand::Sample,
            Hardy | MeanIdentity | WBergman | Critical | TemperedSingle | Pluriharmonic => Subcommand::Interpolate,
            _ => Subcommand::Variance,
        }
    }

    /// Acceptance criteria this experiment computes.
    pub fn criteria(self) -> &'static [u8] {
        use Experiment::*;
        match self {
            Intensity => &[3],
            Hardy => &[4],
            MeanIdentity => &[5],
            WBergman | Critical => &[],
            TemperedSingle => &[13],
            Pluriharmonic => &[14],
            PoincareMass => &[1, 2],
            CriticalKernel => &[9],
            VarianceOracle => &[6],
            IzIdentity => &[7],
            Impossibility => &[8],
            CriticalFloor => &[10],
            ClaimA => &[11],
            Sharp => &[12],
        }
    }

    /// Whether the experiment consumes sampled configurations.
    pub fn uses_configurations(self) -> bool {
        use Experiment::*;
        matches!(
            self,
            Intensity | Hardy | MeanIdentity | WBergman | Critical | Pluriharmonic | VarianceOracle
        )
    }

    /// Default configuration: the grids and sample sizes of the acceptance
    /// criteria.
    pub fn preset(self) -> ExperimentConfig {
        use Experiment::*;
        let out = std::env::var_os(OUT_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("out"));
        let mut c = ExperimentConfig {
            experiment: self,
            d: 1,
            s_grid: Vec::new(),
            z_grid: vec![0.0],
            functions: Vec::new(),
            sampler: SamplerKind::Hkpv,
            window: 6.0,
            n_configurations: 50,
            seed_base: 0,
            out,
            archives: None,
        };
        match self {
            Intensity => {
                c.sampler = SamplerKind::Gaf;
                c.window = 3.0;
                c.n_configurations = 400;
            }
            Hardy => {
                c.s_grid = vec![1.5, 1.3, 1.2, 1.1, 1.05];
                c.z_grid = vec![0.0, 0.4];
                c.functions = vec![FunctionSpec::Hardy(0.0)];
            }
            MeanIdentity => {
                c.s_grid = vec![1.2, 1.5];
                c.functions = vec![FunctionSpec::One, FunctionSpec::Re, FunctionSpec::Poisson(0.0)];
                c.n_configurations = 400;
            }
            WBergman | Critical => {
                c.s_grid = vec![1.5, 1.2, 1.1];
                c.window = 4.0;
                c.n_configurations = 20;
                c.functions = vec![FunctionSpec::Kernel(if self == WBergman {
                    crate::WeightChoice::Super(0.5)
                } else {
                    crate::WeightChoice::Critical
                })];
            }
            TemperedSingle => {
                c.s_grid = vec![1.2, 1.1, 1.05];
                c.functions = vec![FunctionSpec::One, FunctionSpec::Monomial(3), FunctionSpec::Lacunary];
            }
            Pluriharmonic => {
                c.d = 2;
                c.s_grid = vec![2.5, 2.05];
                c.window = 4.0;
                c.n_configurations = 30;
                c.functions = vec![FunctionSpec::Pluri];
            }
            PoincareMass => c.s_grid = vec![1.001, 1.5, 2.0],
            VarianceOracle => {
                c.sampler = SamplerKind::Gaf;
                c.window = 3.0;
                c.n_configurations = 2000;
            }
            IzIdentity => c.z_grid = vec![0.0, 0.5],
            Impossibility => c.z_grid = vec![0.0, 0.4],
            CriticalFloor => c.s_grid = vec![1.2, 1.1, 1.05, 1.02],
            Sharp => c.s_grid = vec![1.25, 1.5, 2.0],
            CriticalKernel | ClaimA => {}
        }
        c
    }
}

impl FromStr for Experiment {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment {s:?}")))
    }
}

/// Tables, criteria and timings of one run.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub criteria: Vec<CriterionResult>,
    /// Archive files written alongside the tables.
    pub archives: Vec<PathBuf>,
    /// Wall-clock seconds per stage.
    pub stages: Vec<(String, f64)>,
}

fn e(x: f64) -> String {
    format!("{x:.12e}")
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn mean_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn generator(kind: SamplerKind) -> Generator {
    match kind {
        SamplerKind::Gaf => Generator::Gaf,
        _ => Generator::Hkpv,
    }
}

/// Configurations for `cfg`: read from `cfg.archives` when set, sampled
/// otherwise.
pub fn load_configurations(cfg: &ExperimentConfig, threads: usize) -> Result<Vec<Configuration>> {
    let seeds: Vec<u64> = cfg.seeds().collect();
    let Some(dir) = &cfg.archives else {
        let spec = cfg.sampler_spec();
        return par_map(&seeds, threads, |&s| spec.sample(s).map_err(Error::from));
    };
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let want = generator(cfg.sampler);
    let mut found: Vec<Option<Configuration>> = vec![None; seeds.len()];
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.extension().and_then(|x| x.to_str()) != Some("txt") {
            continue;
        }
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let c = Configuration::from_archive(&text)
            .map_err(|err| Error::io(&path, std::io::Error::new(std::io::ErrorKind::InvalidData, err.to_string())))?;
        if c.generator != want || c.d != cfg.d || !cfg.seeds().contains(&c.seed) {
            continue;
        }
        let i = (c.seed - cfg.seed_base) as usize;
        found[i] = Some(c);
    }
    found
        .into_iter()
        .zip(&seeds)
        .map(|(c, s)| {
            c.ok_or_else(|| {
                Error::io(
                    dir,
                    std::io::Error::new(
                        std::io::ErrorKind::NotFound,
                        format!("no {want} archive with d = {} for seed {s}", cfg.d),
                    ),
                )
            })
        })
        .collect()
}

/// Runs `cfg`. Experiments that use configurations take `configs` when
/// given and otherwise load them with [`load_configurations`].
pub fn run(cfg: &ExperimentConfig, threads: usize, configs: Option<Vec<Configuration>>) -> Result<Outcome> {
    cfg.validate()?;
    let mut stages = Vec::new();
    let configs = if cfg.experiment.uses_configurations() {
        match configs {
            Some(c) => c,
            None => {
                let t = Instant::now();
                let c = load_configurations(cfg, threads)?;
                stages.push(("sample".to_string(), t.elapsed().as_secs_f64()));
                c
            }
        }
    } else {
        Vec::new()
    };
    let t = Instant::now();
    use Experiment::*;
    let mut out = match cfg.experiment {
        Intensity => intensity(cfg, &configs, threads)?,
        Hardy | WBergman | Critical | Pluriharmonic => interpolation(cfg, &configs, threads)?,
        MeanIdentity => mean_identity(cfg, &configs, threads)?,
        TemperedSingle => tempered_single(cfg)?,
        PoincareMass => poincare_mass_exp(cfg)?,
        CriticalKernel => critical_kernel()?,
        VarianceOracle => variance_oracle(&configs)?,
        IzIdentity => iz_identity(cfg)?,
        Impossibility => impossibility(cfg)?,
        CriticalFloor => critical_floor(cfg)?,
        ClaimA => claim_a()?,
        Sharp => sharp(cfg)?,
    };
    stages.push(("compute".to_string(), t.elapsed().as_secs_f64()));
    out.stages = stages;
    Ok(out)
}

fn require_disk(cfg: &ExperimentConfig) -> Result<()> {
    if cfg.d != 1 {
        return Err(Error::Config(format!("{} runs on the disk (d = 1)", cfg.experiment.name())));
    }
    Ok(())
}

fn intensity(cfg: &ExperimentConfig, gaf: &[Configuration], threads: usize) -> Result<Outcome> {
    require_disk(cfg)?;
    if cfg.sampler != SamplerKind::Gaf {
        return Err(Error::Config("intensity compares GAF samples against HKPV; set sampler = gaf".into()));
    }
    // d_B(o, x) < 2 is the Euclidean disk |x| < tanh 1
    let radius = 2.0;
    let seeds: Vec<u64> = gaf.iter().map(|c| c.seed).collect();
    let spec = HkpvSpec::new(1, cfg.window, HkpvMode::Window);
    let hkpv = par_map(&seeds, threads, |&s| sample_hkpv(&spec, s).map_err(Error::from))?;
    let g = validate_statistics(gaf, &[radius])?.radii.remove(0);
    let h = validate_statistics(&hkpv, &[radius])?.radii.remove(0);
    let mut t = Table::new(
        "intensity",
        "generator,radius,n,mean,variance,expected_mean,expected_variance,mean_z,variance_rel_err",
    );
    for (name, r) in [("gaf", &g), ("hkpv", &h)] {
        t.push(format!(
            "{name},{},{},{},{},{},{},{},{}",
            r.radius,
            r.n,
            e(r.mean),
            e(r.variance),
            e(r.expected_mean),
            e(r.expected_variance),
            e(r.mean_z),
            e(r.variance_rel_err)
        ));
    }
    let se = (g.variance / g.n as f64 + h.variance / h.n as f64).sqrt();
    let agree = (g.mean - h.mean).abs() / se;
    let c = CriterionResult::new(
        3,
        g.mean_z.abs() <= 3.0 && g.variance_rel_err.abs() <= 0.10 && agree <= 3.0,
        "|gaf mean - 1.381097| <= 3 SE, |gaf var/0.874098 - 1| <= 0.10, |gaf - hkpv| <= 3 SE",
    )
    .with("gaf_mean", g.mean)
    .with("gaf_mean_z", g.mean_z)
    .with("gaf_variance", g.variance)
    .with("variance_rel_err", g.variance_rel_err)
    .with("hkpv_mean", h.mean)
    .with("gaf_vs_hkpv_z", agree);
    Ok(Outcome {
        tables: vec![t],
        criteria: vec![c],
        ..Default::default()
    })
}

fn functions(cfg: &ExperimentConfig) -> Result<Vec<(FunctionSpec, TestFunction)>> {
    // kernel sections are evaluated at pairs of window points
    let rho = (0.5 * cfg.window).tanh().powi(2);
    if cfg.functions.is_empty() {
        return Err(Error::Config(format!("{} needs at least one function", cfg.experiment.name())));
    }
    cfg.functions
        .iter()
        .map(|f| Ok((f.clone(), f.build(cfg.d, rho)?)))
        .collect()
}

/// Per-configuration rows and errors `errs[f][s][z]`.
type ConfigResult = (Vec<String>, Vec<Vec<Vec<Option<f64>>>>);

fn interpolation(cfg: &ExperimentConfig, configs: &[Configuration], threads: usize) -> Result<Outcome> {
    let fs = functions(cfg)?;
    let zs = cfg.z_points()?;
    let per: Vec<ConfigResult> = par_map(configs, threads, |x| {
        let mut rows = Vec::new();
        let mut errs = Vec::new();
        for (_, f) in &fs {
            let mut by_s = Vec::new();
            for &s in &cfg.s_grid {
                let mut by_z = Vec::new();
                for z in &zs {
                    let est = ps_weighted_sum(x, s, z, f, None)?;
                    rows.push(est.csv_row()?);
                    by_z.push(est.err_abs);
                }
                by_s.push(by_z);
            }
            errs.push(by_s);
        }
        Ok::<_, Error>((rows, errs))
    })?;
    let mut long = Table::new(cfg.experiment.name(), CSV_HEADER);
    for (rows, _) in &per {
        for r in rows {
            long.push(r.clone());
        }
    }
    let mut summary = Table::new(
        format!("{}-summary", cfg.experiment.name()),
        "function,s,z,n,degenerate,median_err",
    );
    // medians[f][z][s]
    let mut medians = vec![vec![Vec::new(); zs.len()]; fs.len()];
    for (fi, (spec, _)) in fs.iter().enumerate() {
        for (si, &s) in cfg.s_grid.iter().enumerate() {
            for (zi, &z) in cfg.z_grid.iter().enumerate() {
                let v: Vec<Option<f64>> = per.iter().map(|p| p.1[fi][si][zi]).collect();
                let ok: Vec<f64> = v.iter().flatten().copied().collect();
                let m = median(ok.clone());
                summary.push(format!("{spec},{s},{z},{},{},{}", ok.len(), v.len() - ok.len(), e(m)));
                medians[fi][zi].push(m);
            }
        }
    }
    let mut criteria = Vec::new();
    match cfg.experiment {
        Experiment::Hardy => criteria.push(hardy_criterion(&medians)),
        Experiment::Pluriharmonic => {
            let (c, t) = pluri_criterion(cfg, &medians)?;
            criteria.push(c);
            return Ok(Outcome {
                tables: vec![long, summary, t],
                criteria,
                ..Default::default()
            });
        }
        _ => {}
    }
    Ok(Outcome {
        tables: vec![long, summary],
        criteria,
        ..Default::default()
    })
}

fn decreasing_steps(v: &[f64]) -> usize {
    v.windows(2).filter(|w| w[1] < w[0]).count()
}

fn hardy_criterion(medians: &[Vec<Vec<f64>>]) -> CriterionResult {
    let mut pass = true;
    let mut c = CriterionResult::new(
        4,
        false,
        "per z: median error decreases in >= min(4, steps) steps along s_grid, last < 1/2 first",
    )
    .known_red();
    for (zi, m) in medians[0].iter().enumerate() {
        let steps = m.len().saturating_sub(1);
        let dec = decreasing_steps(m);
        let first = m.first().copied().unwrap_or(f64::NAN);
        let last = m.last().copied().unwrap_or(f64::NAN);
        pass &= steps > 0 && dec >= steps.min(4) && last < 0.5 * first;
        c = c
            .with(format!("z{zi}_decreasing_steps"), dec as f64)
            .with(format!("z{zi}_first_median"), first)
            .with(format!("z{zi}_last_median"), last)
            .with(format!("z{zi}_last_over_first"), last / first);
    }
    c.passed = pass;
    c
}

fn pluri_criterion(cfg: &ExperimentConfig, medians: &[Vec<Vec<f64>>]) -> Result<(CriterionResult, Table)> {
    let m = &medians[0][0];
    let (first, last) = (m[0], m[m.len() - 1]);
    let mut t = Table::new("pluriharmonic-bound", "s,n,bound,limit");
    let mut bounds_decrease = true;
    let mut c = CriterionResult::new(
        14,
        false,
        "median error at o decreases from first to last s, and pluri_ratio_bound decreases along |n| = 10, 100, 1000",
    )
    .known_red()
    .with("first_median", first)
    .with("last_median", last);
    for &s in &cfg.s_grid {
        let b: Vec<f64> = [10u64, 100, 1000]
            .iter()
            .map(|&n| pluri_ratio_bound(n, s, cfg.d))
            .collect::<std::result::Result<_, _>>()?;
        let lim = pluri_ratio_limit(s, cfg.d);
        for (n, v) in [10, 100, 1000].iter().zip(&b) {
            t.push(format!("{s},{n},{},{}", e(*v), e(lim)));
        }
        bounds_decrease &= decreasing_steps(&b) == 2;
        c = c.with(format!("bound_s{s}_n10"), b[0]).with(format!("bound_s{s}_n1000"), b[2]);
    }
    c.passed = last < first && bounds_decrease;
    Ok((c, t))
}

/// `∫_{B(o,R)} e^{-s d_B(o,x)} dμ(x) = ∫_0^R ½ e^{-st} sinh t dt`.
fn window_mass(s: f64, r: f64) -> f64 {
    0.25 * (-(-(s - 1.0) * r).exp_m1() / (s - 1.0) + (-(s + 1.0) * r).exp_m1() / (s + 1.0))
}

fn mean_identity(cfg: &ExperimentConfig, configs: &[Configuration], threads: usize) -> Result<Outcome> {
    require_disk(cfg)?;
    if cfg.z_grid.iter().any(|&z| z != 0.0) {
        return Err(Error::Config("mean-identity is evaluated at z = 0".into()));
    }
    let fs = functions(cfg)?;
    let o = Point::origin(1);
    let per: Vec<Vec<C64>> = par_map(configs, threads, |x| {
        let mut v = Vec::new();
        for (_, f) in &fs {
            for &s in &cfg.s_grid {
                let g = ps_weighted_sum(x, s, &o, f, Some(u64::MAX))?;
                v.push(g.g_f.scalar().ok_or_else(|| Error::Config(format!("{} is vector-valued", f.label())))?);
            }
        }
        Ok::<_, Error>(v)
    })?;
    let mut long = Table::new("mean-identity", "seed,function,s,g_f_re,g_f_im");
    let mut summary = Table::new("mean-identity-summary", "function,s,n,mean,se,expected,z_score");
    let mut c = CriterionResult::new(
        5,
        true,
        "|mean g_X(s,0;f) - f(0) * window mass| <= 3 SE for every (f, s)",
    );
    let window = configs.first().map(|x| x.window_radius).unwrap_or(cfg.window);
    let mut worst: f64 = 0.0;
    for (fi, (spec, f)) in fs.iter().enumerate() {
        let f0 = f.evaluate(&o)?;
        for (si, &s) in cfg.s_grid.iter().enumerate() {
            let k = fi * cfg.s_grid.len() + si;
            for (x, v) in configs.iter().zip(&per) {
                long.push(format!("{},{spec},{s},{},{}", x.seed, e(v[k].re), e(v[k].im)));
            }
            let re: Vec<f64> = per.iter().map(|v| v[k].re).collect();
            let (m, se) = mean_se(&re);
            let want = f0.re * window_mass(s, window);
            let z = (m - want) / se;
            summary.push(format!("{spec},{s},{},{},{},{},{}", re.len(), e(m), e(se), e(want), e(z)));
            worst = worst.max(z.abs());
            c = c.with(format!("z_{spec}_s{s}"), z);
        }
    }
    c.passed = worst <= 3.0;
    Ok(Outcome {
        tables: vec![long, summary],
        criteria: vec![c.with("max_abs_z", worst)],
        ..Default::default()
    })
}

const ALPHAS: [f64; 4] = [0.1, 0.05, 0.02, 0.01];

fn tempered_single(cfg: &ExperimentConfig) -> Result<Outcome> {
    require_disk(cfg)?;
    let fs = functions(cfg)?;
    let o = Point::origin(1);
    let mut tt = Table::new("tempered-single", "function,alpha,value");
    let mut vt = Table::new("tempered-single-variance", "function,s,variance,g_P,ratio");
    let mut c = CriterionResult::new(
        13,
        true,
        "non-lacunary: T(0.01) < T(0.1) and variance ratio decreasing in s; lacunary: T(0.01) > 5 T(0.1) and ratio >= 1/2 its first value",
    );
    for (spec, f) in &fs {
        let t: Vec<f64> = ALPHAS
            .iter()
            .map(|&a| tempered_functional(f, a))
            .collect::<std::result::Result<_, _>>()?;
        for (a, v) in ALPHAS.iter().zip(&t) {
            tt.push(format!("{spec},{a},{}", e(*v)));
        }
        let lac = f.kind() == FunctionKind::Lacunary;
        let growth = t[3] / t[0];
        c.passed &= if lac { growth > 5.0 } else { t[3] < t[0] };
        c = c.with(format!("{spec}_T001_over_T01"), growth);
        if matches!(f, TestFunction::Constant { .. }) {
            continue;
        }
        let mut ratios = Vec::new();
        for &s in &cfg.s_grid {
            let v = var_scalar_quadrature(&Radial::poincare(s)?, f, &o)?.value;
            let gp = poincare_mass_disk(s);
            let r = v / (gp * gp);
            vt.push(format!("{spec},{s},{},{},{}", e(v), e(gp), e(r)));
            ratios.push(r);
        }
        let first = ratios[0];
        let last = ratios[ratios.len() - 1];
        c.passed &= if lac {
            ratios.iter().all(|r| *r >= 0.5 * first)
        } else {
            decreasing_steps(&ratios) == ratios.len() - 1
        };
        c = c.with(format!("{spec}_ratio_first"), first).with(format!("{spec}_ratio_last"), last);
    }
    Ok(Outcome {
        tables: vec![tt, vt],
        criteria: vec![c],
        ..Default::default()
    })
}

fn poincare_mass_exp(cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut pts: Vec<(usize, f64)> = cfg.s_grid.iter().map(|&s| (cfg.d, s)).collect();
    for p in [(1, 1.001), (1, 2.0), (2, 2.001)] {
        if !pts.contains(&p) {
            pts.push(p);
        }
    }
    let mut t = Table::new("poincare-mass", "d,s,g_P,scaled");
    for &(d, s) in &pts {
        let g = poincare_mass(s, d)?;
        t.push(format!("{d},{s},{},{}", e(g), e((s - d as f64) * g)));
    }
    let a = 0.001 * poincare_mass(1.001, 1)?;
    let b = 0.001 * poincare_mass(2.001, 2)?;
    let g2 = poincare_mass(2.0, 1)?;
    let c1 = CriterionResult::new(
        1,
        rel(a, 0.2498751) <= 1e-3 && rel(b, 0.125) <= 1e-2,
        "(s-1) g_P(1.001) within 0.1% of 0.2498751 (d=1); (s-2) g_P(2.001) within 1% of 0.125 (d=2)",
    )
    .with("d1_scaled", a)
    .with("d2_scaled", b);
    let c2 = CriterionResult::new(2, rel(g2, 1.0 / 6.0) <= 1e-8, "g_P(2) within 1e-8 relative of 1/6")
        .with("g_P_2", g2)
        .with("rel_err", rel(g2, 1.0 / 6.0));
    Ok(Outcome {
        tables: vec![t],
        criteria: vec![c1, c2],
        ..Default::default()
    })
}

fn critical_kernel() -> Result<Outcome> {
    let crit = WeightSpec::critical(1);
    let k = KernelCoeffs::compute(&crit, 2000, 0.5)?;
    let mut ct = Table::new("critical-kernel-coeffs", "n,a_n,a_n_over_log");
    let mut band = (f64::INFINITY, 0.0f64);
    for (n, a) in k.coeffs.iter().enumerate() {
        let r = a / (4.0 * (n as f64 + 1.0)).ln();
        band = (band.0.min(r), band.1.max(r));
        ct.push(format!("{n},{},{}", e(*a), e(r)));
    }
    let kd = KernelCoeffs::for_range(&crit, 0.999, 1e-9)?;
    let mut dt = Table::new("critical-kernel-diagonal", "t2,K,normalized");
    let mut diag = (f64::INFINITY, 0.0f64);
    for i in 0..=200 {
        let t2 = 0.999 * i as f64 / 200.0;
        let v = kd.eval_diag(t2)?.value;
        let r = v * (1.0 - t2) / (2.0 / (1.0 - t2)).ln();
        diag = (diag.0.min(r), diag.1.max(r));
        dt.push(format!("{t2},{},{}", e(v), e(r)));
    }
    let mut qt = Table::new("critical-kernel-claim", "k,value,value_times_log");
    let mut claim_max = 0.0f64;
    for kk in 0..=10_000u64 {
        let v = critical_claim_integral(kk);
        let s = v * (4.0 * kk as f64 + 4.0).ln();
        claim_max = claim_max.max(s);
        if kk <= 100 || kk % 100 == 0 {
            qt.push(format!("{kk},{},{}", e(v), e(s)));
        }
    }
    let a0_err = (k.coeffs[0] - 4f64.ln()).abs();
    let c = CriterionResult::new(
        9,
        a0_err <= 1e-8 && band.1 / band.0 <= 10.0 && diag.1 / diag.0 <= 10.0 && claim_max <= 2.0,
        "|a_0 - log 4| <= 1e-8; coefficient band and diagonal band max/min <= 10; claim integral * log(4k+4) <= 2 for k <= 1e4",
    )
    .with("a0_abs_err", a0_err)
    .with("coeff_band_ratio", band.1 / band.0)
    .with("diag_band_ratio", diag.1 / diag.0)
    .with("claim_max", claim_max);
    Ok(Outcome {
        tables: vec![ct, dt, qt],
        criteria: vec![c],
        ..Default::default()
    })
}

fn variance_oracle(configs: &[Configuration]) -> Result<Outcome> {
    if configs.first().map(|c| c.d) != Some(1) {
        return Err(Error::Config("variance-oracle runs on the disk (d = 1)".into()));
    }
    let o = Point::origin(1);
    let radius = 2.0;
    let count_mc = var_mc_configs(&McStatistic::Count { radius, z: o.clone() }, configs)?;
    let count_q = var_scalar_quadrature(
        &Radial::Profile(RadialProfile::indicator(radius)),
        &TestFunction::one(1),
        &o,
    )?;
    let p = RadialProfile::indicator(1.5);
    let z = Point::disk(0.3, 0.0)?;
    // the unit weight evaluates kernels in closed form; the table is unused
    let space = Arc::new(RkhsSpace::Kernel(KernelCoeffs::compute(&WeightSpec::unit(1), 64, 0.9)?));
    let kernel_mc = var_mc_configs(
        &McStatistic::Kernel {
            profile: p.clone(),
            z: z.clone(),
            space,
        },
        configs,
    )?;
    let kernel_q = identity_iz(&p, &z)?;
    let mut t = Table::new("variance-oracle", REPORT_HEADER);
    let mut c = CriterionResult::new(6, true, "|mc - quadrature| <= max(5% quadrature, 4 jackknife SE) per statistic");
    for (name, mc, q) in [("count", &count_mc, &count_q), ("kernel", &kernel_mc, &kernel_q)] {
        t.push(mc.csv_row());
        t.push(q.csv_row());
        let tol = (0.05 * q.value).max(4.0 * mc.err);
        c.passed &= (mc.value - q.value).abs() <= tol;
        c = c
            .with(format!("{name}_mc"), mc.value)
            .with(format!("{name}_se"), mc.err)
            .with(format!("{name}_quadrature"), q.value);
    }
    Ok(Outcome {
        tables: vec![t],
        criteria: vec![c],
        ..Default::default()
    })
}

fn iz_profiles() -> [RadialProfile; 2] {
    [RadialProfile::indicator(1.5), RadialProfile::bump(2.5)]
}

fn iz_identity(cfg: &ExperimentConfig) -> Result<Outcome> {
    require_disk(cfg)?;
    let mut t = Table::new("iz-identity", format!("{REPORT_HEADER},rel_diff"));
    let mut worst = 0.0f64;
    for p in iz_profiles() {
        for z in cfg.z_points()? {
            let a: VarianceReport = identity_iz(&p, &z)?;
            let b = identity_iz_angular(&p, &z)?;
            let r = rel(b.value, a.value);
            worst = worst.max(r);
            t.push(format!("{},", a.csv_row()));
            t.push(format!("{},{}", b.csv_row(), e(r)));
        }
    }
    let mut jt = Table::new("iz-identity-residue", "x,y,z_re,z_im,quadrature,closed,rel_diff");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed_base);
    let mut jworst = 0.0f64;
    for _ in 0..5 {
        let x = rng.random_range(0.05..0.9);
        let y = rng.random_range(0.05..0.9);
        let zc = C64::from_polar(rng.random_range(0.0..0.8), rng.random_range(0.0..2.0 * PI));
        let (q, cl) = residue_jz_check(x, y, &Point::new(vec![zc])?)?;
        let r = rel(q, cl);
        jworst = jworst.max(r);
        jt.push(format!("{x},{y},{},{},{},{},{}", zc.re, zc.im, e(q), e(cl), e(r)));
    }
    let c = CriterionResult::new(
        7,
        worst <= 1e-6 && jworst <= 1e-8,
        "closed and angular routes within 1e-6 relative; residue J_z within 1e-8 relative at 5 random triples",
    )
    .with("max_route_rel_diff", worst)
    .with("max_residue_rel_diff", jworst);
    Ok(Outcome {
        tables: vec![t, jt],
        criteria: vec![c],
        ..Default::default()
    })
}

fn impossibility(cfg: &ExperimentConfig) -> Result<Outcome> {
    require_disk(cfg)?;
    let mut profiles: Vec<RadialProfile> = (1..=12).map(|i| RadialProfile::indicator(0.5 * i as f64)).collect();
    profiles.push(RadialProfile::bump(2.0));
    let mut t = Table::new("impossibility", "profile,z,ratio");
    let mut min = f64::INFINITY;
    for p in &profiles {
        for (z, zp) in cfg.z_grid.iter().zip(cfg.z_points()?) {
            let r = impossibility_ratio(p, &zp)?;
            min = min.min(r);
            t.push(format!("{},{z},{}", p.label(), e(r)));
        }
    }
    let c = CriterionResult::new(8, min > 1.0 / 128.0, "min Var/(g^R_P)^2 > 1/128").with("min_ratio", min);
    Ok(Outcome {
        tables: vec![t],
        criteria: vec![c],
        ..Default::default()
    })
}

fn critical_floor(cfg: &ExperimentConfig) -> Result<Outcome> {
    require_disk(cfg)?;
    if cfg.s_grid.len() < 2 {
        return Err(Error::Config("critical-floor needs at least two exponents".into()));
    }
    let mut t = Table::new("critical-floor", "weight,s,variance,g_P,ratio");
    let mut ratios = Vec::new();
    for (name, w) in [("critical", WeightSpec::critical(1)), ("super:0.5", WeightSpec::supercritical(0.5, 1)?)] {
        let k = KernelCoeffs::compute(&w, 4096, 0.5)?;
        let mut r = Vec::new();
        for &s in &cfg.s_grid {
            let v = var_kernel_weighted(&k, &Radial::poincare(s)?)?.value;
            let gp = poincare_mass_disk(s);
            r.push(v / (gp * gp));
            t.push(format!("{name},{s},{},{},{}", e(v), e(gp), e(v / (gp * gp))));
        }
        ratios.push(r);
    }
    let last = cfg.s_grid.len() - 1;
    let crit = ratios[0][last] / ratios[0][0];
    let sup = ratios[1][0] / ratios[1][last];
    let c = CriterionResult::new(
        10,
        crit >= 0.5 && sup >= 3.0,
        "critical: ratio(last s) >= 1/2 ratio(first s); super-critical: ratio(first s)/ratio(last s) >= 3",
    )
    .with("critical_last_over_first", crit)
    .with("super_first_over_last", sup);
    Ok(Outcome {
        tables: vec![t],
        criteria: vec![c],
        ..Default::default()
    })
}

fn claim_a() -> Result<Outcome> {
    let mut t = Table::new("claimA", "n,s,U,V,ratio");
    let mut max = 0.0f64;
    for n in 0..=200u64 {
        for j in 0..=20 {
            let s = 1.0 + 0.05 * j as f64;
            let r = claim_a_uv(n, s)?;
            max = max.max(r.ratio);
            t.push(format!("{n},{s:.2},{},{},{}", e(r.u), e(r.v), e(r.ratio)));
        }
    }
    let r0 = claim_a_uv(0, 1.0)?.ratio;
    let c = CriterionResult::new(
        11,
        (r0 - 0.5724).abs() <= 1e-4 && max < 0.9,
        "|U(0,1)/V(0,1) - 0.5724| <= 1e-4; max U/V over n <= 200, s in [1,2] < 0.9",
    )
    .with("ratio_0_1", r0)
    .with("max_ratio", max);
    Ok(Outcome {
        tables: vec![t],
        criteria: vec![c],
        ..Default::default()
    })
}

const SHARP_N: [u32; 4] = [5, 10, 20, 40];

fn sharp(cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut t = Table::new("sharp", "s,N,value");
    let mut vals = Vec::new();
    for &s in &cfg.s_grid {
        for &n in &SHARP_N {
            let v = sharp_functional(s, n)?;
            t.push(format!("{s},{n},{}", e(v)));
            vals.push((s, n, v));
        }
    }
    let get = |s: f64, n: u32| vals.iter().find(|v| v.0 == s && v.1 == n).map(|v| v.2);
    let mut criteria = Vec::new();
    if let (Some(a5), Some(a20), Some(b20), Some(b40)) = (get(1.25, 5), get(1.25, 20), get(2.0, 20), get(2.0, 40)) {
        let growth = a20 / a5;
        let drift = (b40 - b20).abs() / b20;
        criteria.push(
            CriterionResult::new(
                12,
                growth > 10.0 && drift < 0.05,
                "s=1.25: value(20) > 10 value(5); s=2: |value(40) - value(20)| < 5% value(20)",
            )
            .with("growth_1.25", growth)
            .with("drift_2", drift),
        );
    }
    Ok(Outcome {
        tables: vec![t],
        criteria,
        ..Default::default()
    })
}
