//! CSV tables, the run manifest and the acceptance report.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use psdpp_sampler::Configuration;
use serde_json::{json, Map, Value};

use crate::config::ExperimentConfig;
use crate::experiment::Outcome;
use crate::{Error, Result};

/// Version tag in the first line of every CSV.
pub const CSV_VERSION: &str = "psdpp-csv v1";

/// Short titles of the acceptance criteria, indexed by id − 1.
pub const CRITERIA: [&str; 14] = [
    "critical-exponent mass",
    "closed-form Poincaré mass",
    "sampler intensity",
    "Hardy interpolation error",
    "mean identity",
    "variance oracle agreement",
    "I_z identity",
    "impossibility bound",
    "critical kernel",
    "critical/super-critical dichotomy",
    "Claim A ratio",
    "divergence of the lower bound",
    "tempered classifier",
    "d=2 pluriharmonic interpolation",
];

/// A named CSV table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: String,
    pub rows: Vec<String>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: impl Into<String>) -> Self {
        Table {
            name: name.into(),
            header: header.into(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: String) {
        self.rows.push(row);
    }

    /// File contents: version comment, column header, rows.
    pub fn render(&self, experiment: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# {CSV_VERSION} experiment={experiment}");
        let _ = writeln!(s, "{}", self.header);
        for r in &self.rows {
            let _ = writeln!(s, "{r}");
        }
        s
    }
}

/// Outcome of one acceptance criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub id: u8,
    pub passed: bool,
    pub measured: Vec<(String, f64)>,
    pub required: String,
    /// Expected to fail at desk scale; see the README.
    pub known_red: bool,
}

impl CriterionResult {
    pub fn new(id: u8, passed: bool, required: impl Into<String>) -> Self {
        CriterionResult {
            id,
            passed,
            measured: Vec::new(),
            required: required.into(),
            known_red: false,
        }
    }

    pub fn with(mut self, key: impl Into<String>, v: f64) -> Self {
        self.measured.push((key.into(), v));
        self
    }

    pub fn known_red(mut self) -> Self {
        self.known_red = true;
        self
    }

    pub fn title(&self) -> &'static str {
        CRITERIA[self.id as usize - 1]
    }

    /// `PASS 7 I_z identity: key=value ... (required: ...)`.
    pub fn line(&self) -> String {
        let mut s = format!("{} {:>2} {}:", if self.passed { "PASS" } else { "FAIL" }, self.id, self.title());
        for (k, v) in &self.measured {
            let _ = write!(s, " {k}={v:.6e}");
        }
        let _ = write!(s, " (required: {})", self.required);
        if self.known_red && !self.passed {
            s.push_str(" [known red]");
        }
        s
    }

    pub fn to_json(&self) -> Value {
        let measured: Map<String, Value> = self.measured.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        json!({
            "id": self.id,
            "title": self.title(),
            "passed": self.passed,
            "measured": measured,
            "required": self.required,
            "known_red": self.known_red,
        })
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Writes one archive per configuration under `dir`, named
/// `<generator>-d<d>-<seed>.txt`, and returns the paths.
pub fn write_archives(dir: &Path, configs: &[Configuration]) -> Result<Vec<PathBuf>> {
    configs
        .iter()
        .map(|c| {
            let p = dir.join(format!("{}-d{}-{:08}.txt", c.generator, c.d, c.seed));
            write_file(&p, &c.to_archive())?;
            Ok(p)
        })
        .collect()
}

pub fn read_manifest(out: &Path) -> Result<Option<Value>> {
    let path = out.join("manifest.json");
    match std::fs::read_to_string(&path) {
        Ok(text) => serde_json::from_str(&text)
            .map(Some)
            .map_err(|source| Error::Json { path, source }),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(Error::io(&path, e)),
    }
}

/// Writes the outcome's tables under `cfg.out` and merges its entry into
/// `manifest.json`. Returns the paths written.
pub fn write_outcome(cfg: &ExperimentConfig, key: &str, outcome: &Outcome, threads: usize) -> Result<Vec<PathBuf>> {
    let t0 = std::time::Instant::now();
    let mut files = Vec::new();
    for t in &outcome.tables {
        let p = cfg.out.join(format!("{}.csv", t.name));
        write_file(&p, &t.render(cfg.experiment.name()))?;
        files.push(p);
    }
    files.extend(outcome.archives.iter().cloned());
    let mut stages = outcome.stages.clone();
    stages.push(("write".into(), t0.elapsed().as_secs_f64()));

    let mut manifest = read_manifest(&cfg.out)?.unwrap_or_else(|| json!({}));
    let root = manifest
        .as_object_mut()
        .ok_or_else(|| Error::Config("manifest.json is not an object".into()))?;
    root.insert("code_version".into(), json!(env!("CARGO_PKG_VERSION")));
    let exps = root
        .entry("experiments")
        .or_insert_with(|| json!({}))
        .as_object_mut()
        .ok_or_else(|| Error::Config("manifest experiments is not an object".into()))?;
    let seconds: Map<String, Value> = stages.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
    let outputs: Vec<Value> = files
        .iter()
        .map(|p| json!(p.strip_prefix(&cfg.out).unwrap_or(p).display().to_string()))
        .collect();
    exps.insert(
        key.to_string(),
        json!({
            "experiment": cfg.experiment.name(),
            "config_hash": cfg.hash(),
            "config": cfg.canonical(),
            "threads": threads,
            "outputs": outputs,
            "seconds": seconds,
            "criteria": outcome.criteria.iter().map(CriterionResult::to_json).collect::<Vec<_>>(),
        }),
    );
    let path = cfg.out.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).map_err(|source| Error::Json {
        path: path.clone(),
        source,
    })?;
    write_file(&path, &(text + "\n"))?;
    Ok(files)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Incomplete,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Incomplete => "incomplete",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub status: Status,
    pub criteria: Vec<(u8, Status, Option<Value>)>,
    pub json: Value,
}

/// Summarises `manifest.json` in `out` over all criteria and writes
/// `report.json`. A criterion no experiment has produced is incomplete; the
/// overall status is `fail` if any criterion failed, else `incomplete` if any
/// is missing, else `pass`.
pub fn report(out: &Path) -> Result<Report> {
    let manifest = read_manifest(out)?.unwrap_or_else(|| json!({}));
    let mut found: Vec<Option<Value>> = vec![None; CRITERIA.len()];
    if let Some(exps) = manifest.get("experiments").and_then(Value::as_object) {
        for e in exps.values() {
            for c in e.get("criteria").and_then(Value::as_array).into_iter().flatten() {
                let Some(id) = c.get("id").and_then(Value::as_u64) else { continue };
                if (1..=CRITERIA.len() as u64).contains(&id) {
                    let mut c = c.clone();
                    if let (Some(o), Some(name)) = (c.as_object_mut(), e.get("experiment")) {
                        o.insert("experiment".into(), name.clone());
                    }
                    found[id as usize - 1] = Some(c);
                }
            }
        }
    }
    let mut criteria = Vec::new();
    let mut rows = Vec::new();
    for (i, c) in found.into_iter().enumerate() {
        let id = i as u8 + 1;
        let status = match c.as_ref().and_then(|c| c.get("passed")).and_then(Value::as_bool) {
            Some(true) => Status::Pass,
            Some(false) => Status::Fail,
            None => Status::Incomplete,
        };
        let mut row = json!({ "id": id, "title": CRITERIA[i], "status": status.as_str() });
        if let Some(c) = &c {
            for k in ["measured", "required", "known_red", "experiment"] {
                if let Some(v) = c.get(k) {
                    row[k] = v.clone();
                }
            }
        }
        rows.push(row);
        criteria.push((id, status, c));
    }
    let status = if criteria.iter().any(|c| c.1 == Status::Fail) {
        Status::Fail
    } else if criteria.iter().any(|c| c.1 == Status::Incomplete) {
        Status::Incomplete
    } else {
        Status::Pass
    };
    let json = json!({
        "status": status.as_str(),
        "code_version": env!("CARGO_PKG_VERSION"),
        "criteria": rows,
    });
    let path = out.join("report.json");
    let text = serde_json::to_string_pretty(&json).map_err(|source| Error::Json {
        path: path.clone(),
        source,
    })?;
    write_file(&path, &(text + "\n"))?;
    Ok(Report { status, criteria, json })
}
