//! Time-series CSV, JSON summary and sampled-state tables.

use std::fs;
use std::path::Path;

use flrw_bgk::dynamics::Trajectory;
use flrw_bgk::{DistributionState, EquilibriumParams, Statistics};
use serde::Serialize;

use crate::CliError;

pub const TIMESERIES_FILE: &str = "timeseries.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const CONFIG_ECHO_FILE: &str = "config.toml";
pub const FINAL_STATE_FILE: &str = "final_state.csv";

/// 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn timeseries_header(stats: Statistics, matched: bool) -> Vec<&'static str> {
    let mut cols = vec!["t", "rho", "energy", "T"];
    if stats == Statistics::BoseEinstein {
        cols.extend(["c", "gamma"]);
    }
    if matched {
        cols.push("linf_vs_analytic");
    }
    cols
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

pub fn write_timeseries(path: &Path, traj: &Trajectory, stats: Statistics) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_error(path, e))?;
    w.write_record(timeseries_header(stats, traj.matched))
        .map_err(|e| io_error(path, e))?;
    for d in &traj.diagnostics {
        let mut row = vec![
            fmt_f64(d.time),
            fmt_f64(d.moments.rho),
            fmt_f64(d.moments.energy),
            fmt_f64(d.temperature),
        ];
        if let EquilibriumParams::BoseEinstein { c, gamma } = d.params {
            row.push(fmt_f64(c));
            row.push(fmt_f64(gamma));
        }
        if traj.matched {
            row.push(d.linf_vs_analytic.map(fmt_f64).unwrap_or_default());
        }
        w.write_record(&row).map_err(|e| io_error(path, e))?;
    }
    w.flush().map_err(|e| io_error(path, e))
}

/// Nodes, weights and values of one or more states on a shared grid.
pub fn write_states(path: &Path, columns: &[(&str, &DistributionState)]) -> Result<(), CliError> {
    let grid = columns[0].1.grid();
    let mut w = csv::Writer::from_path(path).map_err(|e| io_error(path, e))?;
    let mut header = vec!["r", "weight"];
    header.extend(columns.iter().map(|(name, _)| *name));
    w.write_record(&header).map_err(|e| io_error(path, e))?;
    for i in 0..grid.len() {
        let mut row = vec![fmt_f64(grid.nodes()[i]), fmt_f64(grid.weights()[i])];
        row.extend(columns.iter().map(|(_, s)| fmt_f64(s.values()[i])));
        w.write_record(&row).map_err(|e| io_error(path, e))?;
    }
    w.flush().map_err(|e| io_error(path, e))
}

#[derive(Debug, Clone, Serialize)]
pub struct GridSummary {
    pub rule: String,
    pub n_nodes: usize,
    pub r_max: Option<f64>,
    pub tolerance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FailureSummary {
    pub step: usize,
    pub time: f64,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub run: String,
    pub statistics: String,
    pub stepper: String,
    pub dt: f64,
    pub t_end: f64,
    pub steps_recorded: usize,
    pub completed: bool,
    pub failure: Option<FailureSummary>,
    pub matched: bool,
    pub max_rho_drift: f64,
    pub max_energy_drift: f64,
    pub max_drift: f64,
    pub max_analytic_deviation: Option<f64>,
    pub final_time: f64,
    pub final_rho: f64,
    pub final_energy: f64,
    pub final_temperature: f64,
    pub final_equilibrium: Option<String>,
    pub grid: GridSummary,
    pub wall_time_seconds: f64,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| io_error(path, e))?;
    fs::write(path, text + "\n").map_err(|e| io_error(path, e))
}
