use std::fmt::Write as _;

use cascade_core::analysis::{aggregate, branch_fraction, rescue_benefit, susceptibility_sweep, sweep, DEFAULT_BRANCH_THRESHOLD};
use cascade_core::meanfield::{basin_map, MeanFieldParams};
use cascade_core::{run_ensemble, CascadeError};
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::config::{ConfigError, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] CascadeError),
    #[error("{command}: missing `{key}` ({hint})")]
    Missing { command: Command, key: &'static str, hint: &'static str },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Per-realization default trajectories of one ensemble.
    Run,
    /// Ensemble statistics along one parameter axis.
    Sweep,
    /// Response of the default count to the panic field.
    Susceptibility,
    /// Defaults saved by rescue budgets.
    Rescue,
    /// Basin map of the mean-field iteration.
    Meanfield,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Run => "run",
            Command::Sweep => "sweep",
            Command::Susceptibility => "susceptibility",
            Command::Rescue => "rescue",
            Command::Meanfield => "meanfield",
        }
    }
}

impl std::fmt::Display for Command {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

pub struct CommandOutput {
    pub csv: String,
    pub summary: serde_json::Value,
}

pub const TRAJECTORY_HEADER: &str = "realization,t,nd_cum,panic_active,rescues_used";
pub const SWEEP_HEADER: &str = "axis,value,n,h,b,p0,q0,realizations,nd_mean,nd_std,nd_over_n_mean,nd_over_n_std";
pub const SUSCEPTIBILITY_HEADER: &str = "j0,delta_h,chi,chi_std,realizations";
pub const RESCUE_HEADER: &str = "j0,h,b,delta_nd_over_n,realizations";
pub const BASIN_HEADER: &str = "p0,q0,p_inf,q_inf,converged,iterations";

/// Runs `command` and assembles its CSV in memory. The CSV depends only on
/// the configuration.
pub fn execute(command: Command, config: &RunConfig) -> Result<CommandOutput, CliError> {
    config.validate()?;
    match command {
        Command::Run => run(config),
        Command::Sweep => run_sweep(config),
        Command::Susceptibility => run_susceptibility(config),
        Command::Rescue => run_rescue(config),
        Command::Meanfield => run_meanfield(config),
    }
}

fn j0_values(config: &RunConfig) -> Vec<f64> {
    if config.j0_values.is_empty() {
        vec![config.j0]
    } else {
        config.j0_values.clone()
    }
}

fn run(config: &RunConfig) -> Result<CommandOutput, CliError> {
    let ensemble = run_ensemble(&config.model_params(), config.realizations)?;
    let mut csv = format!("{TRAJECTORY_HEADER}\n");
    for (r, realization) in ensemble.realizations.iter().enumerate() {
        for (t, nd) in realization.nd_trajectory.iter().enumerate() {
            let _ = writeln!(
                csv,
                "{r},{t},{nd},{},{}",
                realization.panic_active_at(t),
                realization.rescues_trajectory[t]
            );
        }
    }
    let stats = aggregate(&ensemble)?;
    let panicked = ensemble.realizations.iter().filter(|r| r.panic_onset_step.is_some()).count();
    let summary = json!({
        "nd_mean": stats.nd_mean,
        "nd_std": stats.nd_std,
        "nd_over_n_mean": stats.nd_over_n_mean,
        "nd_over_n_std": stats.nd_over_n_std,
        "per_step_means": stats.per_step_means,
        "branch_fraction": branch_fraction(&ensemble, DEFAULT_BRANCH_THRESHOLD)?,
        "panic_fraction": panicked as f64 / ensemble.realizations.len() as f64,
    });
    Ok(CommandOutput { csv, summary })
}

fn run_sweep(config: &RunConfig) -> Result<CommandOutput, CliError> {
    let axis = config.axis.ok_or(CliError::Missing {
        command: Command::Sweep,
        key: "axis",
        hint: "one of j0, h, n, b, p0q0",
    })?;
    if config.values.is_empty() {
        return Err(CliError::Missing { command: Command::Sweep, key: "values", hint: "comma-separated list" });
    }
    let table = sweep(&config.model_params(), axis, &config.values, config.realizations)?;
    let mut csv = format!("{SWEEP_HEADER}\n");
    for point in &table.points {
        let (p, s) = (&point.params, &point.stats);
        let _ = writeln!(
            csv,
            "{axis},{},{},{},{},{},{},{},{},{},{},{}",
            point.value,
            p.n,
            p.h,
            p.bailout_budget,
            p.p0,
            p.q0,
            table.realizations,
            s.nd_mean,
            s.nd_std,
            s.nd_over_n_mean,
            s.nd_over_n_std
        );
    }
    let curve: Vec<_> = table
        .points
        .iter()
        .map(|p| json!({ "value": p.value.to_string(), "nd_over_n_mean": p.stats.nd_over_n_mean }))
        .collect();
    Ok(CommandOutput { csv, summary: json!({ "axis": axis, "points": curve }) })
}

fn run_susceptibility(config: &RunConfig) -> Result<CommandOutput, CliError> {
    let estimates = susceptibility_sweep(
        &config.model_params(),
        &j0_values(config),
        config.delta_h,
        config.realizations,
        config.paired,
    )?;
    let mut csv = format!("{SUSCEPTIBILITY_HEADER}\n");
    for e in &estimates {
        let _ = writeln!(csv, "{},{},{},{},{}", e.j0, e.delta_h, e.chi, e.chi_std, e.realizations);
    }
    let peak = estimates.iter().max_by(|a, b| a.chi.total_cmp(&b.chi)).expect("at least one j0");
    Ok(CommandOutput {
        csv,
        summary: json!({ "paired": config.paired, "max_chi": peak.chi, "max_chi_j0": peak.j0 }),
    })
}

fn run_rescue(config: &RunConfig) -> Result<CommandOutput, CliError> {
    if config.b_values.is_empty() {
        return Err(CliError::Missing { command: Command::Rescue, key: "b_values", hint: "comma-separated budgets" });
    }
    let rows = rescue_benefit(&config.model_params(), &j0_values(config), &config.b_values, config.realizations)?;
    let mut csv = format!("{RESCUE_HEADER}\n");
    for row in &rows {
        let _ = writeln!(csv, "{},{},{},{},{}", row.j0, row.h, row.b, row.delta_nd_over_n, row.realizations);
    }
    let peaks: Vec<_> = config
        .b_values
        .iter()
        .map(|&b| {
            let best = rows
                .iter()
                .filter(|r| r.b == b)
                .max_by(|x, y| x.delta_nd_over_n.total_cmp(&y.delta_nd_over_n))
                .expect("every budget has rows");
            json!({ "b": b, "max_delta_nd_over_n": best.delta_nd_over_n, "at_j0": best.j0 })
        })
        .collect();
    Ok(CommandOutput { csv, summary: json!({ "peaks": peaks }) })
}

fn run_meanfield(config: &RunConfig) -> Result<CommandOutput, CliError> {
    let jtilde = config.jtilde.ok_or(CliError::Missing {
        command: Command::Meanfield,
        key: "jtilde",
        hint: "effective mean-field coupling",
    })?;
    let params = MeanFieldParams { jtilde, h: config.h, tol: config.tol, max_iter: config.max_iter };
    let grid = basin_map(&params, config.resolution)?;
    let mut csv = format!("{BASIN_HEADER}\n");
    for cell in &grid.cells {
        let r = &cell.result;
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            cell.start.p, cell.start.q, r.point.p, r.point.q, r.converged, r.iterations
        );
    }
    let unconverged = grid.cells.iter().filter(|c| !c.result.converged).count();
    Ok(CommandOutput {
        csv,
        summary: json!({
            "cells": grid.cells.len(),
            "unconverged": unconverged,
            "distinct_p_inf": grid.distinct_p_inf(1e-6),
        }),
    })
}
