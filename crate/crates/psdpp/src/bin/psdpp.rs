use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand as ClapSub};
use psdpp::{
    load_configurations, parse_seeds, report, run, write_archives, write_outcome, Experiment, ExperimentConfig, Status,
    Subcommand,
};

/// Patterson–Sullivan interpolation experiments on the Bergman process.
#[derive(Parser)]
#[command(name = "psdpp", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(ClapSub)]
enum Cmd {
    /// Sample configurations and write one archive per seed.
    Sample(RunArgs),
    /// Run an interpolation experiment.
    Interpolate(RunArgs),
    /// Run a variance experiment.
    Variance(RunArgs),
    /// Summarise the manifest in the output directory as report.json.
    Report {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Config file; a bare experiment name selects its preset.
    #[arg(long)]
    config: String,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed range `a..b`, overriding seed_base and n_configurations.
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

fn load(args: &RunArgs) -> psdpp::Result<ExperimentConfig> {
    let path = PathBuf::from(&args.config);
    let mut cfg = if path.exists() {
        ExperimentConfig::load(&path)?
    } else {
        args.config.parse::<Experiment>()?.preset()
    };
    if let Some(out) = &args.out {
        cfg.out = out.clone();
    }
    if let Some(s) = &args.seeds {
        let r = parse_seeds(s)?;
        cfg.seed_base = r.start;
        cfg.n_configurations = (r.end - r.start) as usize;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn print_criteria(criteria: &[psdpp::CriterionResult]) -> bool {
    for c in criteria {
        println!("{}", c.line());
    }
    criteria.iter().all(|c| c.passed)
}

fn execute(sub: Subcommand, args: &RunArgs) -> psdpp::Result<bool> {
    let cfg = load(args)?;
    if sub == Subcommand::Sample {
        let t = std::time::Instant::now();
        let configs = load_configurations(&cfg, args.threads)?;
        let files = write_archives(&cfg.out.join("archives"), &configs)?;
        let secs = t.elapsed().as_secs_f64();
        let mut outcome = if cfg.experiment == Experiment::Intensity {
            run(&cfg, args.threads, Some(configs))?
        } else {
            psdpp::Outcome::default()
        };
        outcome.stages.insert(0, ("sample".into(), secs));
        outcome.archives = files;
        let key = if cfg.experiment == Experiment::Intensity {
            cfg.experiment.name().to_string()
        } else {
            format!("sample:{}", cfg.experiment.name())
        };
        write_outcome(&cfg, &key, &outcome, args.threads)?;
        println!("wrote {} archives to {}", outcome.archives.len(), cfg.out.join("archives").display());
        return Ok(print_criteria(&outcome.criteria));
    }
    if cfg.experiment.subcommand() != sub {
        return Err(psdpp::Error::Config(format!(
            "experiment {} belongs to `psdpp {}`",
            cfg.experiment.name(),
            cfg.experiment.subcommand().as_str()
        )));
    }
    let outcome = run(&cfg, args.threads, None)?;
    for f in write_outcome(&cfg, cfg.experiment.name(), &outcome, args.threads)? {
        println!("wrote {}", f.display());
    }
    Ok(print_criteria(&outcome.criteria))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Sample(a) => execute(Subcommand::Sample, a),
        Cmd::Interpolate(a) => execute(Subcommand::Interpolate, a),
        Cmd::Variance(a) => execute(Subcommand::Variance, a),
        Cmd::Report { out } => {
            let out = out
                .clone()
                .or_else(|| std::env::var_os(psdpp::config::OUT_ENV).map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("out"));
            report(&out).map(|r| {
                for (id, status, _) in &r.criteria {
                    println!("{:>2} {:<10} {}", id, status.as_str(), psdpp::CRITERIA[*id as usize - 1]);
                }
                println!("status: {}", r.status.as_str());
                r.status != Status::Fail
            })
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
