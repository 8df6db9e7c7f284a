//! One runner per experiment. Each returns its tables in a fixed order;
//! sweep points are evaluated in parallel and collected in grid order.

use dwell_core::dynamics::{
    evolution_ground_state_negativity, quench_evolve, quenched_open_run, series, Channel, QuenchSpec,
};
use dwell_core::entanglement::{bec_negativity_closed_form, eof_bound_with, negativity_pair};
use dwell_core::operators::hamiltonian;
use dwell_core::{gibbs_state, ground_state, sector_basis, DensityMatrix, ModelParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::config::{Experiment, ExperimentConfig};
use crate::error::{CliError, Result};
use crate::table::{Cell, Table};
use crate::verify::verify_sector;

pub fn run(cfg: &ExperimentConfig) -> Result<Vec<Table>> {
    cfg.validate()?;
    match cfg.experiment {
        Experiment::Thermal => run_thermal(cfg),
        Experiment::BecScaling => run_bec_scaling(cfg),
        Experiment::Quench => run_quench(cfg),
        Experiment::Dephasing => run_dissipative(cfg, Channel::Dephasing),
        Experiment::Loss => run_dissipative(cfg, Channel::Loss),
        Experiment::Eof => run_eof(cfg),
        Experiment::Verify => run_verify(cfg),
    }
}

/// Interaction strength for sweeps parametrized by `J/U`.
const UNIT_U: f64 = 1.0;

/// Gibbs-state negativity over `(β, J/U)` at U = 1, one table per N.
pub fn run_thermal(cfg: &ExperimentConfig) -> Result<Vec<Table>> {
    cfg.n
        .iter()
        .map(|&n| {
            let basis = sector_basis(n);
            let asymptote = bec_negativity_closed_form(n);
            let points: Vec<(f64, f64)> = cfg
                .beta
                .iter()
                .flat_map(|&b| cfg.j_over_u.iter().map(move |&x| (b, x)))
                .collect();
            let values = points
                .par_iter()
                .map(|&(beta, x)| {
                    let h = hamiltonian(&basis, ModelParams { j: x, u: UNIT_U });
                    let rho = gibbs_state(&h, beta)?;
                    Ok(negativity_pair(&rho)?.value)
                })
                .collect::<Result<Vec<f64>>>()?;

            let mut table = Table::new(
                format!("thermal_N{n}"),
                &["N", "beta", "j_over_u", "negativity", "bec_asymptote"],
            );
            for (&(beta, x), neg) in points.iter().zip(values) {
                table.push(vec![n.into(), beta.into(), x.into(), neg.into(), asymptote.into()]);
            }
            Ok(table)
        })
        .collect()
}

/// Power law `y = c xᵅ` fitted by least squares on `y` itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub alpha: f64,
    pub prefactor: f64,
    /// Root-mean-square residual `y − c xᵅ`.
    pub residual: f64,
    /// Slope of an ordinary least-squares line through `(log x, log y)`.
    pub log_log_slope: f64,
}

fn log_log_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let m = lx.len() as f64;
    let mean_x = lx.iter().sum::<f64>() / m;
    let mean_y = ly.iter().sum::<f64>() / m;
    let sxx: f64 = lx.iter().map(|x| (x - mean_x).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mean_x) * (y - mean_y)).sum();
    Some(sxy / sxx)
}

/// Optimal prefactor and residual sum of squares at fixed exponent.
fn profile(xs: &[f64], ys: &[f64], alpha: f64) -> (f64, f64) {
    let powers: Vec<f64> = xs.iter().map(|x| x.powf(alpha)).collect();
    let c = powers.iter().zip(ys).map(|(p, y)| p * y).sum::<f64>() / powers.iter().map(|p| p * p).sum::<f64>();
    let sse = powers.iter().zip(ys).map(|(p, y)| (y - c * p).powi(2)).sum();
    (c, sse)
}

/// Exponent search range and coarse scan step.
const ALPHA_RANGE: (f64, f64) = (-4.0, 4.0);
const ALPHA_SCAN_STEP: f64 = 1e-2;

pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> Option<PowerLawFit> {
    if xs.len() != ys.len() || xs.len() < 2 || xs.iter().chain(ys).any(|&v| !(v > 0.0 && v.is_finite())) {
        return None;
    }
    let slope = log_log_slope(xs, ys)?;
    let sse = |a: f64| profile(xs, ys, a).1;

    let steps = ((ALPHA_RANGE.1 - ALPHA_RANGE.0) / ALPHA_SCAN_STEP).round() as usize;
    let best = (0..=steps)
        .map(|k| ALPHA_RANGE.0 + k as f64 * ALPHA_SCAN_STEP)
        .min_by(|a, b| sse(*a).total_cmp(&sse(*b)))?;

    // Golden-section refinement around the best scan point.
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (best - ALPHA_SCAN_STEP, best + ALPHA_SCAN_STEP);
    let mut p = hi - ratio * (hi - lo);
    let mut q = lo + ratio * (hi - lo);
    let (mut fp, mut fq) = (sse(p), sse(q));
    while hi - lo > 1e-13 {
        if fp <= fq {
            hi = q;
            q = p;
            fq = fp;
            p = hi - ratio * (hi - lo);
            fp = sse(p);
        } else {
            lo = p;
            p = q;
            fp = fq;
            q = lo + ratio * (hi - lo);
            fq = sse(q);
        }
    }
    let alpha = 0.5 * (lo + hi);
    let (prefactor, sse) = profile(xs, ys, alpha);
    Some(PowerLawFit {
        alpha,
        prefactor,
        residual: (sse / xs.len() as f64).sqrt(),
        log_log_slope: slope,
    })
}

/// Closed-form BEC negativity against N, annotated with the power-law fit.
pub fn run_bec_scaling(cfg: &ExperimentConfig) -> Result<Vec<Table>> {
    let mut ns = cfg.n.clone();
    ns.sort_unstable();
    ns.dedup();
    let values: Vec<f64> = ns.par_iter().map(|&n| bec_negativity_closed_form(n)).collect();
    let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let fit = fit_power_law(&xs, &values)
        .ok_or_else(|| CliError::Config("`n`: need at least two distinct particle numbers".into()))?;

    let mut table = Table::new("bec_scaling", &["N", "negativity"]);
    for (&n, v) in ns.iter().zip(&values) {
        table.push(vec![n.into(), (*v).into()]);
    }
    table.annotate("alpha", fit.alpha);
    table.annotate("prefactor", fit.prefactor);
    table.annotate("residual", fit.residual);
    table.annotate("log_log_slope", fit.log_log_slope);
    Ok(vec![table])
}

fn quench_spec(cfg: &ExperimentConfig, t_max: f64) -> QuenchSpec {
    QuenchSpec {
        initial: cfg.initial.params(),
        evolution: cfg.evolution.params(),
        t_max,
        samples: cfg.samples,
        allow_degenerate: cfg.allow_degenerate,
    }
}

fn series_table(name: String, ts: &series::TimeSeries, extra: &[(&str, f64)]) -> Table {
    let mut columns: Vec<&str> = vec!["t"];
    columns.extend(ts.channel_names());
    columns.extend(extra.iter().map(|(c, _)| *c));
    let mut table = Table::new(name, &columns);
    for (k, &t) in ts.times().iter().enumerate() {
        let mut row = vec![Cell::from(t)];
        row.extend(ts.channels().iter().map(|(_, v)| Cell::from(v[k])));
        row.extend(extra.iter().map(|&(_, v)| Cell::from(v)));
        table.push(row);
    }
    table
}

/// Closed quench per N, with the post-quench ground-state negativity as a
/// reference column.
pub fn run_quench(cfg: &ExperimentConfig) -> Result<Vec<Table>> {
    let spec = quench_spec(cfg, cfg.t_max.unwrap_or(50.0));
    cfg.n
        .par_iter()
        .map(|&n| {
            let ts = quench_evolve(&spec, n)?;
            let reference = evolution_ground_state_negativity(&spec, n)?;
            let mut table = series_table(format!("quench_N{n}"), &ts, &[("ground_state_negativity", reference)]);
            table.annotate("N", n);
            Ok(table)
        })
        .collect()
}

/// One table per `(N, γ)`, N major.
pub fn run_dissipative(cfg: &ExperimentConfig, channel: Channel) -> Result<Vec<Table>> {
    let points: Vec<(usize, f64)> = cfg
        .n
        .iter()
        .flat_map(|&n| cfg.gamma.iter().map(move |&g| (n, g)))
        .collect();
    points
        .par_iter()
        .map(|&(n, gamma)| {
            let t_max = cfg.dissipative_t_max(gamma);
            let spec = quench_spec(cfg, t_max);
            let ts = quenched_open_run(&spec, channel, gamma, n, cfg.integrator.into())?;
            let mut table = series_table(format!("{channel}_N{n}_g{gamma}"), &ts, &[]);
            table.annotate("N", n);
            table.annotate("gamma", gamma);
            table.annotate("t_max", t_max);
            table.annotate("mode", json!(cfg.mode));
            Ok(table)
        })
        .collect()
}

/// EoF lower bounds of the U = 1 ground state over the `J/U` grid, one table per N.
pub fn run_eof(cfg: &ExperimentConfig) -> Result<Vec<Table>> {
    cfg.n
        .iter()
        .map(|&n| {
            let basis = sector_basis(n);
            let reports = cfg
                .j_over_u
                .par_iter()
                .map(|&x| {
                    let gs = ground_state(&hamiltonian(&basis, ModelParams { j: x, u: UNIT_U }))?;
                    Ok(eof_bound_with(&DensityMatrix::from_pure(&gs.state)?, cfg.s_reading.into())?)
                })
                .collect::<Result<Vec<_>>>()?;
            let mut table = Table::new(format!("eof_N{n}"), &["N", "j_over_u", "F", "G", "s", "bound"]);
            for (&x, r) in cfg.j_over_u.iter().zip(reports) {
                table.push(vec![n.into(), x.into(), r.f.into(), r.g.into(), r.s.into(), r.bound.into()]);
            }
            Ok(table)
        })
        .collect()
}

/// Randomized check of the negativity formula against the partial-transpose
/// oracle and of the EoF bounds against the exact pure-state value. Each N
/// draws from its own stream so the result does not depend on scheduling.
pub fn run_verify(cfg: &ExperimentConfig) -> Result<Vec<Table>> {
    let outcomes = cfg
        .n
        .par_iter()
        .map(|&n| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(n as u64);
            verify_sector(n, cfg.samples, cfg.s_reading.into(), &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new("verify", &["N", "trials", "max_negativity_gap", "max_bound_excess"]);
    for (&n, o) in cfg.n.iter().zip(outcomes) {
        table.push(vec![n.into(), o.trials.into(), o.max_negativity_gap.into(), o.max_bound_excess.into()]);
    }
    table.annotate("seed", cfg.seed);
    Ok(vec![table])
}
