use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use femtocell_cli::{load_config, run_experiment, trace_trial, write_json, ExperimentSpec};

#[derive(Parser)]
#[command(
    name = "femtosim",
    version,
    about = "Hierarchical PRB allocation experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the demand sweep and write the CSV curve.
    Run(Common),
    /// Run one seeded trial and dump every intermediate result as JSON.
    Trial {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        topology: u64,
        #[arg(long, default_value_t = 0)]
        draw: u64,
        /// Demand for this trial; defaults to the first sweep point.
        #[arg(long)]
        demand: Option<f64>,
    },
    /// Check the configuration and print it resolved.
    Validate(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Override a config key, e.g. `--set system.n_topologies=20`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long, value_parser = ["ideal", "sinr"])]
    mode: Option<String>,
    /// Worker threads; defaults to one per core.
    #[arg(long)]
    jobs: Option<usize>,
}

impl Common {
    fn spec(&self) -> Result<ExperimentSpec> {
        let mut overrides = self.set.clone();
        if let Some(s) = self.seed {
            overrides.push(format!("system.master_seed={s}"));
        }
        if let Some(m) = &self.mode {
            overrides.push(format!("system.eval_mode=\"{m}\""));
        }
        let mut spec = load_config(self.config.as_deref(), &overrides)?;
        if self.out.is_some() {
            spec.out.clone_from(&self.out);
        }
        Ok(spec)
    }

    fn init_threads(&self) -> Result<()> {
        if let Some(n) = self.jobs {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()?;
        }
        Ok(())
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(common) => {
            common.init_threads()?;
            run_experiment(&common.spec()?)?;
        }
        Command::Trial {
            common,
            topology,
            draw,
            demand,
        } => {
            common.init_threads()?;
            let spec = common.spec()?;
            let record = trace_trial(
                &spec,
                demand.unwrap_or(spec.demand_sweep_bps[0]),
                topology,
                draw,
            )?;
            match &spec.out {
                Some(path) => write_json(&record, path)?,
                None => writeln!(
                    std::io::stdout().lock(),
                    "{}",
                    serde_json::to_string_pretty(&record)?
                )?,
            }
        }
        Command::Validate(common) => {
            let spec = common.spec()?;
            writeln!(
                std::io::stdout().lock(),
                "{}",
                serde_json::to_string_pretty(&spec)?
            )?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
