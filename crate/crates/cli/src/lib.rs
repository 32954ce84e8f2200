//! Experiment files, sweeps and output for the `femtosim` binary.
//!
//! An experiment file is TOML with two tables:
//!
//! ```toml
//! [experiment]
//! label = "high-density"
//! demand_sweep_bps = [0.5e6, 1e6, 2e6]
//! out = "curve.csv"
//!
//! [system]
//! fap_density_per_m2 = 0.01
//! n_topologies = 20
//!
//! [system.propagation]
//! shadow_sigma_db = 8.0
//! ```
//!
//! Every key is optional and unknown keys are rejected.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use femtocell_core::simulation::run_trial_detailed;
use femtocell_core::{run_sweep, seed, SweepPoint, SystemConfig, TrialRecord};
use serde::{Deserialize, Serialize};

pub const CSV_HEADER: &str =
    "demand_bps,outage_mean,outage_stderr,min_rate_mean,max_rate_mean,n_trials,seed";

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ExperimentSection {
    label: Option<String>,
    demand_sweep_bps: Option<Vec<f64>>,
    out: Option<PathBuf>,
    trial_dump: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ExperimentFile {
    experiment: ExperimentSection,
    system: SystemConfig,
}

/// A validated experiment: a base system plus the demands to sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSpec {
    pub label: String,
    pub system: SystemConfig,
    /// Strictly increasing, bits/s.
    pub demand_sweep_bps: Vec<f64>,
    /// CSV destination; stdout when absent.
    pub out: Option<PathBuf>,
    /// JSON dump of the first trial at the first sweep point.
    pub trial_dump: Option<PathBuf>,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        self.system.validate()?;
        let sweep = &self.demand_sweep_bps;
        if sweep.is_empty() {
            bail!("experiment.demand_sweep_bps: must not be empty");
        }
        if let Some(bad) = sweep.iter().find(|d| !(d.is_finite() && **d > 0.0)) {
            bail!("experiment.demand_sweep_bps: {bad} is not a positive rate");
        }
        if let Some(w) = sweep.windows(2).find(|w| w[1] <= w[0]) {
            bail!(
                "experiment.demand_sweep_bps: must be strictly increasing, {} follows {}",
                w[1],
                w[0]
            );
        }
        Ok(())
    }
}

/// Parses `text` as a TOML value, falling back to a bare string.
fn parse_value(text: &str) -> toml::Value {
    format!("v = {text}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(text.to_string()))
}

/// Applies one `key=value` override. Keys are dotted paths; a path that
/// does not start with `experiment` or `system` is taken relative to
/// `system`.
pub fn apply_override(doc: &mut toml::Table, assignment: &str) -> Result<()> {
    let (key, value) = assignment
        .split_once('=')
        .with_context(|| format!("override `{assignment}` is not of the form key=value"))?;
    let key = key.trim();
    let mut path: Vec<&str> = key.split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        bail!("override key `{key}` is malformed");
    }
    if !matches!(path[0], "experiment" | "system") {
        path.insert(0, "system");
    }
    let (last, parents) = path.split_last().expect("nonempty");
    let mut table = doc;
    for part in parents {
        let entry = table
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry
            .as_table_mut()
            .with_context(|| format!("override `{key}`: `{part}` is not a table"))?;
    }
    table.insert(last.to_string(), parse_value(value.trim()));
    Ok(())
}

/// Builds a spec from TOML text plus `key=value` overrides.
pub fn parse_spec(text: &str, overrides: &[String]) -> Result<ExperimentSpec> {
    let mut doc: toml::Table = text.parse().context("malformed experiment file")?;
    for o in overrides {
        apply_override(&mut doc, o)?;
    }
    let file: ExperimentFile = doc.try_into().context("invalid experiment file")?;
    let system = file.system;
    let spec = ExperimentSpec {
        label: file.experiment.label.unwrap_or_else(|| "default".into()),
        demand_sweep_bps: file
            .experiment
            .demand_sweep_bps
            .unwrap_or_else(|| vec![system.demand_bps]),
        out: file.experiment.out,
        trial_dump: file.experiment.trial_dump,
        system,
    };
    spec.validate()?;
    Ok(spec)
}

/// Reads and validates an experiment file. Without a path, every setting
/// takes its default.
pub fn load_config(path: Option<&Path>, overrides: &[String]) -> Result<ExperimentSpec> {
    let text = match path {
        Some(p) => fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
        None => String::new(),
    };
    parse_spec(&text, overrides)
}

#[derive(Serialize)]
struct CsvRow {
    demand_bps: f64,
    outage_mean: f64,
    outage_stderr: f64,
    min_rate_mean: f64,
    max_rate_mean: f64,
    n_trials: usize,
    seed: u64,
}

pub fn write_csv<W: Write>(points: &[SweepPoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for p in points {
        w.serialize(CsvRow {
            demand_bps: p.demand_bps,
            outage_mean: p.outage_mean,
            outage_stderr: p.outage_stderr,
            min_rate_mean: p.min_rate_mean,
            max_rate_mean: p.max_rate_mean,
            n_trials: p.n_trials,
            seed: p.seed,
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string(points: &[SweepPoint]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(points, &mut buf)?;
    Ok(String::from_utf8(buf)?)
}

/// Traces trial `(topology, draw)` of the spec's system at `demand_bps`.
pub fn trace_trial(
    spec: &ExperimentSpec,
    demand_bps: f64,
    topology: u64,
    draw: u64,
) -> Result<TrialRecord> {
    let cfg = SystemConfig {
        demand_bps,
        ..spec.system.clone()
    };
    let master = cfg.master_seed;
    Ok(run_trial_detailed(
        &cfg,
        seed::topology_seed(master, topology),
        seed::channel_seed(master, topology, draw),
    )?)
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = std::io::BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Runs the sweep and writes the CSV (to `spec.out` or stdout) and the
/// optional trial dump. Returns the sweep points.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<SweepPoint>> {
    spec.validate()?;
    let points = run_sweep(&spec.system, &spec.demand_sweep_bps)?;
    match &spec.out {
        Some(path) => {
            let file =
                fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
            write_csv(&points, file)?;
        }
        None => write_csv(&points, std::io::stdout().lock())?,
    }
    if let Some(path) = &spec.trial_dump {
        let record = trace_trial(spec, spec.demand_sweep_bps[0], 0, 0)?;
        write_json(&record, path)?;
    }
    Ok(points)
}
