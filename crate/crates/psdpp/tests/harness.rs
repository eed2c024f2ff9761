use std::path::{Path, PathBuf};
use std::process::Command;

use psdpp::sampler::Configuration;
use psdpp::*;

fn tmp(name: &str) -> PathBuf {
    let p = std::env::temp_dir().join(format!("psdpp-harness-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&p);
    p
}

fn small_hardy(out: &Path) -> ExperimentConfig {
    let mut c = ExperimentConfig::parse("experiment = hardy\nn_configurations = 4\nwindow = 4\ns_grid = 1.5, 1.2\n").unwrap();
    c.out = out.to_path_buf();
    c
}

#[test]
fn config_parses_and_defaults_to_preset() {
    let c = ExperimentConfig::parse(
        "# comment\nexperiment = hardy  # trailing\nd = 1\ns_grid = 1.5, 1.1\nz_grid = 0, 0.4\nfunctions = hardy:0, poisson:1.5\nsampler = hkpv-truncated\nwindow = 5\nn_configurations = 7\nseed_base = 11\nout = x\n",
    )
    .unwrap();
    assert_eq!(c.experiment, Experiment::Hardy);
    assert_eq!(c.s_grid, vec![1.5, 1.1]);
    assert_eq!(c.functions, vec![FunctionSpec::Hardy(0.0), FunctionSpec::Poisson(1.5)]);
    assert_eq!(c.sampler, SamplerKind::HkpvTruncated);
    assert_eq!(c.seeds(), 11..18);
    let p = ExperimentConfig::parse("experiment = pluriharmonic").unwrap();
    assert_eq!(p, Experiment::Pluriharmonic.preset());
    assert_eq!(p.d, 2);
}

#[test]
fn canonical_text_round_trips() {
    for e in Experiment::ALL {
        let c = e.preset();
        let back = ExperimentConfig::parse(&c.canonical()).unwrap();
        assert_eq!(back, c, "{}", e.name());
        assert_eq!(back.hash(), c.hash());
    }
    let a = Experiment::Hardy.preset();
    let mut b = a.clone();
    b.seed_base = 1;
    assert_ne!(a.hash(), b.hash());
    assert_eq!(a.hash().len(), 64);
}

#[test]
fn config_rejects_invalid_input() {
    let bad = [
        "d = 1",
        "experiment = nope",
        "experiment = hardy\ncolour = red",
        "experiment = hardy\nexperiment = sharp",
        "experiment = hardy\ns_grid = 1.0",
        "experiment = hardy\ns_grid = 2.5",
        "experiment = pluriharmonic\ns_grid = 1.5",
        "experiment = hardy\nn_configurations = 0",
        "experiment = hardy\nz_grid = 1",
        "experiment = hardy\nfunctions = sine",
        "experiment = hardy\nsampler = poisson",
        "experiment = hardy\nwindow = -1",
        "experiment = hardy\njust words",
    ];
    for t in bad {
        assert!(matches!(ExperimentConfig::parse(t), Err(Error::Config(_))), "{t:?}");
    }
}

#[test]
fn function_descriptors_round_trip() {
    for s in [
        "one",
        "re",
        "monomial:4",
        "poisson:0.5",
        "lacunary",
        "hardy:1",
        "kernel:unit",
        "kernel:critical",
        "kernel:super:0.5",
        "pluri",
    ] {
        let f: FunctionSpec = s.parse().unwrap();
        assert_eq!(f.to_string(), s);
    }
    assert!(FunctionSpec::Pluri.build(1, 0.5).is_err());
    assert!(FunctionSpec::Lacunary.build(2, 0.5).is_err());
    assert_eq!(FunctionSpec::Pluri.build(2, 0.5).unwrap().dim(), 2);
}

#[test]
fn seed_ranges() {
    assert_eq!(parse_seeds("3..10").unwrap(), 3..10);
    assert!(parse_seeds("10..3").is_err());
    assert!(parse_seeds("5").is_err());
}

#[test]
fn par_map_is_order_preserving() {
    let xs: Vec<u64> = (0..37).collect();
    let one = par_map(&xs, 1, |x| Ok::<_, ()>(x * x)).unwrap();
    for t in [2, 5, 64] {
        assert_eq!(par_map(&xs, t, |x| Ok::<_, ()>(x * x)).unwrap(), one);
    }
    let r = par_map(&xs, 4, |&x| if x == 20 || x == 30 { Err(x) } else { Ok(x) });
    assert_eq!(r, Err(20));
}

#[test]
fn runs_are_byte_identical() {
    let (a, b) = (tmp("det-a"), tmp("det-b"));
    for (dir, threads) in [(&a, 1), (&b, 3)] {
        let c = small_hardy(dir);
        let o = run(&c, threads, None).unwrap();
        write_outcome(&c, "hardy", &o, threads).unwrap();
    }
    for f in ["hardy.csv", "hardy-summary.csv"] {
        let x = std::fs::read(a.join(f)).unwrap();
        assert_eq!(x, std::fs::read(b.join(f)).unwrap(), "{f}");
        assert!(String::from_utf8(x).unwrap().starts_with("# psdpp-csv v1 experiment=hardy\n"));
    }
}

#[test]
fn archives_round_trip_and_feed_runs() {
    let dir = tmp("arch");
    let c = small_hardy(&dir);
    let configs = load_configurations(&c, 2).unwrap();
    let files = write_archives(&dir.join("archives"), &configs).unwrap();
    assert_eq!(files.len(), 4);
    for (f, x) in files.iter().zip(&configs) {
        let back = Configuration::from_archive(&std::fs::read_to_string(f).unwrap()).unwrap();
        assert_eq!(&back, x);
    }
    let mut from_disk = c.clone();
    from_disk.archives = Some(dir.join("archives"));
    assert_eq!(load_configurations(&from_disk, 1).unwrap(), configs);
    let sampled = run(&c, 1, None).unwrap();
    let read = run(&from_disk, 1, None).unwrap();
    assert_eq!(sampled.tables, read.tables);

    from_disk.n_configurations = 6;
    assert!(matches!(load_configurations(&from_disk, 1), Err(Error::Io { .. })));
    from_disk.archives = Some(dir.join("missing"));
    assert!(matches!(load_configurations(&from_disk, 1), Err(Error::Io { .. })));
}

#[test]
fn d2_archive_declares_hkpv() {
    let dir = tmp("d2");
    let mut c = ExperimentConfig::parse("experiment = pluriharmonic\nn_configurations = 1\nwindow = 2").unwrap();
    c.out = dir.clone();
    let files = write_archives(&dir, &load_configurations(&c, 1).unwrap()).unwrap();
    let text = std::fs::read_to_string(&files[0]).unwrap();
    assert!(text.lines().take(3).any(|l| l.contains("generator=hkpv")), "{text}");
}

#[test]
fn report_statuses() {
    let dir = tmp("report");
    let r = report(&dir).unwrap();
    assert_eq!(r.status, Status::Incomplete);
    assert_eq!(r.criteria.len(), 14);
    assert_eq!(r.json["status"], "incomplete");

    let mut c = Experiment::PoincareMass.preset();
    c.out = dir.clone();
    write_outcome(&c, c.experiment.name(), &run(&c, 1, None).unwrap(), 1).unwrap();
    let r = report(&dir).unwrap();
    assert_eq!(r.status, Status::Incomplete);
    assert_eq!(r.criteria[0].1, Status::Pass);
    assert_eq!(r.criteria[1].1, Status::Pass);
    assert_eq!(r.json["criteria"][0]["experiment"], "poincare-mass");

    let failing = Outcome {
        criteria: vec![CriterionResult::new(12, false, "x").with("value", 3.0)],
        ..Default::default()
    };
    let mut s = Experiment::Sharp.preset();
    s.out = dir.clone();
    write_outcome(&s, "sharp", &failing, 1).unwrap();
    let r = report(&dir).unwrap();
    assert_eq!(r.status, Status::Fail);
    let row = &r.json["criteria"][11];
    assert_eq!(row["status"], "fail");
    assert_eq!(row["measured"]["value"], 3.0);
    assert_eq!(row["required"], "x");
    assert!(dir.join("report.json").exists());
}

#[test]
fn manifest_records_every_run() {
    let dir = tmp("manifest");
    for e in [Experiment::Sharp, Experiment::ClaimA] {
        let mut c = e.preset();
        c.out = dir.clone();
        write_outcome(&c, e.name(), &run(&c, 1, None).unwrap(), 1).unwrap();
    }
    let m = read_manifest(&dir).unwrap().unwrap();
    let sharp = &m["experiments"]["sharp"];
    assert_eq!(sharp["config_hash"], Experiment::Sharp.preset().hash());
    assert_eq!(sharp["outputs"][0], "sharp.csv");
    assert!(sharp["seconds"]["compute"].as_f64().unwrap() >= 0.0);
    assert!(m["experiments"]["claimA"].is_object());
    assert_eq!(m["code_version"], env!("CARGO_PKG_VERSION"));
}

fn psdpp(args: &[&str]) -> (i32, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_psdpp")).args(args).output().unwrap();
    (o.status.code().unwrap(), String::from_utf8_lossy(&o.stdout).into_owned())
}

#[test]
fn cli_exit_codes() {
    let dir = tmp("cli");
    let out = dir.to_str().unwrap();
    let (code, _) = psdpp(&["report", "--out", out]);
    assert_eq!(code, 0);
    let (code, text) = psdpp(&["variance", "--config", "poincare-mass", "--out", out]);
    assert_eq!(code, 0, "{text}");
    assert!(text.contains("PASS  1"));
    assert_eq!(psdpp(&["variance", "--config", "hardy", "--out", out]).0, 1);
    assert_eq!(psdpp(&["variance", "--config", "no-such", "--out", out]).0, 1);

    let cfg = dir.join("fail.cfg");
    // a one-point s grid gives no decreasing steps
    std::fs::write(&cfg, "experiment = hardy\ns_grid = 1.5\nn_configurations = 3\nwindow = 3\n").unwrap();
    assert_eq!(psdpp(&["interpolate", "--config", cfg.to_str().unwrap(), "--out", out]).0, 2);
    assert_eq!(psdpp(&["report", "--out", out]).0, 2);

    let (code, text) = psdpp(&["sample", "--config", "hardy", "--seeds", "5..8", "--threads", "2", "--out", out]);
    assert_eq!(code, 0, "{text}");
    assert!(dir.join("archives/hkpv-d1-00000007.txt").exists());
}
