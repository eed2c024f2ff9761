//! Driving an experiment from a config string and folding the manifest into
//! a report, as the `psdpp` binary does.

use psdpp::{report, run, write_outcome, ExperimentConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::temp_dir().join("psdpp-example");
    let mut cfg = ExperimentConfig::parse(
        "experiment = hardy\n\
         s_grid = 1.5, 1.2, 1.1\n\
         n_configurations = 10\n\
         window = 5\n",
    )?;
    cfg.out = out.clone();
    println!("config hash {}", cfg.hash());
    let o = run(&cfg, 2, None)?;
    for f in write_outcome(&cfg, "hardy", &o, 2)? {
        println!("wrote {}", f.display());
    }
    for c in &o.criteria {
        println!("{}", c.line());
    }
    let r = report(&out)?;
    println!("report status: {}", r.status.as_str());
    Ok(())
}
