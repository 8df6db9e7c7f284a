//! Experiment configuration: JSON file, per-experiment defaults and
//! command-line overrides, merged into one validated [`ExperimentConfig`].

use std::fmt;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use dwell_core::dynamics::{Channel, Integrator};
use dwell_core::entanglement::SBoundReading;
use dwell_core::ModelParams;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Thermal,
    BecScaling,
    Quench,
    Dephasing,
    Loss,
    Eof,
    /// Randomized cross-check of the negativity formula and the EoF bounds.
    Verify,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Thermal => "thermal",
            Experiment::BecScaling => "bec-scaling",
            Experiment::Quench => "quench",
            Experiment::Dephasing => "dephasing",
            Experiment::Loss => "loss",
            Experiment::Eof => "eof",
            Experiment::Verify => "verify",
        }
    }

    pub fn channel(self) -> Option<Channel> {
        match self {
            Experiment::Dephasing => Some(Channel::Dephasing),
            Experiment::Loss => Some(Channel::Loss),
            _ => None,
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

/// Initial state of a dissipative run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum DissipativeMode {
    /// Ground state of the evolution Hamiltonian itself.
    GroundStateDecay,
    /// Ground state of `initial`, evolved under `evolution`.
    #[default]
    Quench,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntegratorChoice {
    #[default]
    Rk4,
    Exact,
}

impl From<IntegratorChoice> for Integrator {
    fn from(choice: IntegratorChoice) -> Self {
        match choice {
            IntegratorChoice::Rk4 => Integrator::Rk4,
            IntegratorChoice::Exact => Integrator::Exact,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SReading {
    #[default]
    ParticleNumber,
    Dimension,
}

impl From<SReading> for SBoundReading {
    fn from(r: SReading) -> Self {
        match r {
            SReading::ParticleNumber => SBoundReading::ParticleNumber,
            SReading::Dimension => SBoundReading::Dimension,
        }
    }
}

/// Hopping and on-site interaction of one Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coupling {
    pub j: f64,
    pub u: f64,
}

impl Coupling {
    pub const fn new(j: f64, u: f64) -> Self {
        Self { j, u }
    }

    pub fn params(self) -> ModelParams {
        ModelParams { j: self.j, u: self.u }
    }
}

/// Config file contents. Every field is optional; missing ones take the
/// experiment's defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub experiment: Option<Experiment>,
    pub n: Option<Vec<usize>>,
    pub beta: Option<Vec<f64>>,
    pub j_over_u: Option<Vec<f64>>,
    pub gamma: Option<Vec<f64>>,
    pub t_max: Option<f64>,
    pub samples: Option<usize>,
    pub initial: Option<Coupling>,
    pub evolution: Option<Coupling>,
    pub mode: Option<DissipativeMode>,
    pub integrator: Option<IntegratorChoice>,
    pub allow_degenerate: Option<bool>,
    pub s_reading: Option<SReading>,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub seed: Option<u64>,
}

impl ConfigFile {
    /// Parses JSON, reporting the offending field path and position on failure.
    pub fn from_json(text: &str) -> Result<Self> {
        let mut de = serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(&mut de).map_err(|err| {
            let path = err.path().to_string();
            let inner = err.into_inner();
            CliError::Config(format!(
                "at `{path}` (line {}, column {}): {inner}",
                inner.line(),
                inner.column()
            ))
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Fields set in `other` win.
    pub fn overlay(self, other: ConfigFile) -> ConfigFile {
        ConfigFile {
            experiment: other.experiment.or(self.experiment),
            n: other.n.or(self.n),
            beta: other.beta.or(self.beta),
            j_over_u: other.j_over_u.or(self.j_over_u),
            gamma: other.gamma.or(self.gamma),
            t_max: other.t_max.or(self.t_max),
            samples: other.samples.or(self.samples),
            initial: other.initial.or(self.initial),
            evolution: other.evolution.or(self.evolution),
            mode: other.mode.or(self.mode),
            integrator: other.integrator.or(self.integrator),
            allow_degenerate: other.allow_degenerate.or(self.allow_degenerate),
            s_reading: other.s_reading.or(self.s_reading),
            out: other.out.or(self.out),
            format: other.format.or(self.format),
            seed: other.seed.or(self.seed),
        }
    }
}

/// Fully resolved run configuration, echoed into every output file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub n: Vec<usize>,
    pub beta: Vec<f64>,
    pub j_over_u: Vec<f64>,
    pub gamma: Vec<f64>,
    /// `None` in dissipative runs means `20/γ` per rate.
    pub t_max: Option<f64>,
    pub samples: usize,
    pub initial: Coupling,
    pub evolution: Coupling,
    pub mode: DissipativeMode,
    pub integrator: IntegratorChoice,
    pub allow_degenerate: bool,
    pub s_reading: SReading,
    pub out: PathBuf,
    pub format: OutputFormat,
    pub seed: u64,
}

/// `J/U = 0, 0.25, ..., 20`.
pub fn default_thermal_grid() -> Vec<f64> {
    (0..=80).map(|k| k as f64 * 0.25).collect()
}

/// `J/U = 0` followed by ten points per decade from 0.01 to 100.
pub fn default_eof_grid() -> Vec<f64> {
    std::iter::once(0.0)
        .chain((-20..=20).map(|k| 10f64.powf(k as f64 / 10.0)))
        .collect()
}

/// Dissipative runs end at this many lifetimes `1/γ` unless `t_max` is given.
pub const DEFAULT_LIFETIMES: f64 = 20.0;

impl ExperimentConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        let mut cfg = ExperimentConfig {
            experiment,
            n: (1..=5).collect(),
            beta: vec![0.5, 1.0, 5.0, 10.0],
            j_over_u: default_thermal_grid(),
            gamma: vec![0.1, 1.0, 10.0],
            t_max: None,
            samples: 401,
            initial: Coupling::new(0.1, 1.0),
            evolution: Coupling::new(1.0, 1.0),
            mode: DissipativeMode::Quench,
            integrator: IntegratorChoice::Rk4,
            allow_degenerate: false,
            s_reading: SReading::ParticleNumber,
            out: PathBuf::from("out"),
            format: OutputFormat::Csv,
            seed: 0,
        };
        match experiment {
            Experiment::Thermal => cfg.n = vec![1, 2, 5, 10],
            Experiment::BecScaling => cfg.n = (1..=100).collect(),
            Experiment::Quench => {
                cfg.t_max = Some(50.0);
                cfg.samples = 2001;
            }
            Experiment::Dephasing => {}
            Experiment::Loss => {
                cfg.initial = Coupling::new(1.0, 1.0);
                cfg.evolution = Coupling::new(0.1, 1.0);
            }
            Experiment::Eof => {
                cfg.n = vec![1, 5, 20, 100];
                cfg.j_over_u = default_eof_grid();
            }
            Experiment::Verify => {
                cfg.n = (1..=6).collect();
                cfg.samples = 500;
            }
        }
        cfg
    }

    /// Applies `file` on top of the defaults for `experiment` and validates.
    pub fn resolve(experiment: Experiment, file: ConfigFile) -> Result<Self> {
        if let Some(named) = file.experiment {
            if named != experiment {
                return Err(CliError::Config(format!(
                    "config is for `{named}` but `{experiment}` was requested"
                )));
            }
        }
        let mut cfg = Self::defaults(experiment);
        if let Some(v) = file.n {
            cfg.n = v;
        }
        if let Some(v) = file.beta {
            cfg.beta = v;
        }
        if let Some(v) = file.j_over_u {
            cfg.j_over_u = v;
        }
        if let Some(v) = file.gamma {
            cfg.gamma = v;
        }
        if file.t_max.is_some() {
            cfg.t_max = file.t_max;
        }
        if let Some(v) = file.samples {
            cfg.samples = v;
        }
        if let Some(v) = file.initial {
            cfg.initial = v;
        }
        if let Some(v) = file.evolution {
            cfg.evolution = v;
        }
        if let Some(v) = file.mode {
            cfg.mode = v;
        }
        if let Some(v) = file.integrator {
            cfg.integrator = v;
        }
        if let Some(v) = file.allow_degenerate {
            cfg.allow_degenerate = v;
        }
        if let Some(v) = file.s_reading {
            cfg.s_reading = v;
        }
        if let Some(v) = file.out {
            cfg.out = v;
        }
        if let Some(v) = file.format {
            cfg.format = v;
        }
        if let Some(v) = file.seed {
            cfg.seed = v;
        }
        if cfg.channel().is_some() && cfg.mode == DissipativeMode::GroundStateDecay {
            if file.initial.is_some() && file.initial != Some(cfg.evolution) {
                return Err(CliError::Config(
                    "`initial` conflicts with mode `ground-state-decay`, which starts from the ground state of `evolution`"
                        .into(),
                ));
            }
            if file.evolution.is_none() {
                cfg.evolution = Coupling::new(1.0, 1.0);
            }
            cfg.initial = cfg.evolution;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn channel(&self) -> Option<Channel> {
        self.experiment.channel()
    }

    /// End time of a dissipative run at rate `gamma`.
    pub fn dissipative_t_max(&self, gamma: f64) -> f64 {
        self.t_max.unwrap_or(DEFAULT_LIFETIMES / gamma)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(CliError::Config(msg));
        let uses = |field: &str| -> bool {
            match self.experiment {
                Experiment::Thermal => matches!(field, "n" | "beta" | "j_over_u"),
                Experiment::BecScaling => field == "n",
                Experiment::Quench => matches!(field, "n" | "time"),
                Experiment::Dephasing | Experiment::Loss => matches!(field, "n" | "gamma" | "time"),
                Experiment::Eof => matches!(field, "n" | "j_over_u"),
                Experiment::Verify => field == "n",
            }
        };

        if self.n.is_empty() {
            return fail("`n` must not be empty".into());
        }
        if let Some(pos) = self.n.iter().position(|&n| n == 0) {
            return fail(format!("`n[{pos}]`: particle number must be at least 1"));
        }
        if self.experiment == Experiment::BecScaling && self.n.len() < 5 {
            return fail(format!("`n`: the power-law fit needs at least 5 points, got {}", self.n.len()));
        }
        if uses("beta") {
            check_grid("beta", &self.beta, |b| b >= 0.0, "must be finite and non-negative")?;
        }
        if uses("j_over_u") {
            check_grid("j_over_u", &self.j_over_u, |x| x >= 0.0, "must be finite and non-negative")?;
        }
        if uses("gamma") {
            let positive = self.t_max.is_none();
            check_grid(
                "gamma",
                &self.gamma,
                |g| if positive { g > 0.0 } else { g >= 0.0 },
                if positive {
                    "must be positive when `t_max` is derived from it"
                } else {
                    "must be finite and non-negative"
                },
            )?;
        }
        if uses("time") {
            if let Some(t) = self.t_max {
                if !(t.is_finite() && t > 0.0) {
                    return fail(format!("`t_max`: must be positive, got {t}"));
                }
            }
            if self.samples < 2 {
                return fail(format!("`samples`: need at least 2, got {}", self.samples));
            }
            for (name, c) in [("initial", self.initial), ("evolution", self.evolution)] {
                if !(c.j.is_finite() && c.u.is_finite()) {
                    return fail(format!("`{name}`: couplings must be finite"));
                }
            }
        }
        if self.experiment == Experiment::Verify && self.samples == 0 {
            return fail("`samples`: need at least one trial per particle number".into());
        }
        Ok(())
    }
}

fn check_grid(name: &str, grid: &[f64], ok: impl Fn(f64) -> bool, what: &str) -> Result<()> {
    if grid.is_empty() {
        return Err(CliError::Config(format!("`{name}` must not be empty")));
    }
    for (i, &v) in grid.iter().enumerate() {
        if !v.is_finite() || !ok(v) {
            return Err(CliError::Config(format!("`{name}[{i}]` = {v}: {what}")));
        }
    }
    Ok(())
}
