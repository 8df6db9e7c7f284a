use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use dwell_cli::config::{ConfigFile, Coupling, DissipativeMode};
use dwell_cli::{run, write_tables, CliError, Experiment, ExperimentConfig, OutputFormat};

/// Two-site Bose-Hubbard experiments.
#[derive(Debug, Parser)]
#[command(name = "dwell", version)]
struct Args {
    experiment: Experiment,

    /// JSON config; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Particle numbers, comma separated.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,

    #[arg(long, value_delimiter = ',')]
    beta: Option<Vec<f64>>,

    #[arg(long = "j-over-u", value_delimiter = ',')]
    j_over_u: Option<Vec<f64>>,

    #[arg(long, value_delimiter = ',')]
    gamma: Option<Vec<f64>>,

    #[arg(long = "t-max")]
    t_max: Option<f64>,

    #[arg(long)]
    samples: Option<usize>,

    /// Pre-quench hopping J; keeps the configured U.
    #[arg(long = "j-initial")]
    j_initial: Option<f64>,

    /// Post-quench hopping J; keeps the configured U.
    #[arg(long = "j-evolution")]
    j_evolution: Option<f64>,

    /// Dissipative runs only.
    #[arg(long, value_enum)]
    mode: Option<DissipativeMode>,

    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,

    #[arg(long, value_enum)]
    format: Option<OutputFormat>,

    #[arg(long)]
    seed: Option<u64>,
}

impl Args {
    fn overrides(&self, file: &ConfigFile) -> ConfigFile {
        let defaults = ExperimentConfig::defaults(self.experiment);
        let with_j = |j: Option<f64>, base: Option<Coupling>, fallback: Coupling| {
            j.map(|j| Coupling::new(j, base.unwrap_or(fallback).u))
        };
        ConfigFile {
            n: self.n.clone(),
            beta: self.beta.clone(),
            j_over_u: self.j_over_u.clone(),
            gamma: self.gamma.clone(),
            t_max: self.t_max,
            samples: self.samples,
            initial: with_j(self.j_initial, file.initial, defaults.initial),
            evolution: with_j(self.j_evolution, file.evolution, defaults.evolution),
            mode: self.mode,
            out: self.out.clone(),
            format: self.format,
            seed: self.seed,
            ..Default::default()
        }
    }
}

fn execute(args: &Args) -> Result<Vec<PathBuf>, CliError> {
    let file = match &args.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let cfg = ExperimentConfig::resolve(args.experiment, {
        let overrides = args.overrides(&file);
        file.overlay(overrides)
    })?;
    let tables = run(&cfg)?;
    write_tables(&tables, &cfg)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("dwell: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
