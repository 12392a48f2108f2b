//! Subcommand implementations.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use flrw_bgk::dynamics::{conservation_report, simulate as integrate};
use flrw_bgk::equilibrium::{beta_upper_bound, build_equilibrium};
use flrw_bgk::verify::{run_all, VerifyOptions, VerifyReport};
use flrw_bgk::{
    EquilibriumParams, Error, MomentPair, RadialGrid, RuleKind, SeriesTolerance, Statistics,
};

use crate::config::{initial_state, read_table, LoadedConfig};
use crate::output::{
    fmt_f64, write_json, write_states, write_timeseries, FailureSummary, GridSummary, RunSummary,
    CONFIG_ECHO_FILE, FINAL_STATE_FILE, SUMMARY_FILE, TIMESERIES_FILE,
};
use crate::CliError;

/// Result of one simulation whose outputs were written.
#[derive(Debug)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub summary: RunSummary,
    /// Set when `J(F)` could not be built partway through the run.
    pub failure: Option<Error>,
}

impl RunOutcome {
    pub fn into_result(self) -> Result<RunOutcome, CliError> {
        match self.failure {
            Some(e) => Err(CliError::Math(e)),
            None => Ok(self),
        }
    }
}

fn classify(e: Error) -> CliError {
    match e {
        Error::InvalidConfig(msg) => CliError::Config(msg),
        other => CliError::Math(other),
    }
}

pub fn simulate(config_path: &Path, out_root: &Path) -> Result<RunOutcome, CliError> {
    run_loaded(&LoadedConfig::load(config_path)?, out_root)
}

/// Runs one loaded config and writes its outputs below `out_root`.
pub fn run_loaded(loaded: &LoadedConfig, out_root: &Path) -> Result<RunOutcome, CliError> {
    let cfg = &loaded.config;
    let grid = cfg.grid()?;
    let solver = cfg.solver_config()?;
    let f0 = initial_state(loaded, &grid)?;

    let dir = out_root.join(loaded.run_name());
    fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;

    let start = Instant::now();
    let traj = integrate(&f0, &solver).map_err(classify)?;
    let wall = start.elapsed().as_secs_f64();
    let conservation = conservation_report(&traj);

    let last = traj.diagnostics.last();
    let summary = RunSummary {
        run: loaded.run_name(),
        statistics: cfg.statistics.to_string(),
        stepper: solver.stepper.to_string(),
        dt: solver.dt,
        t_end: solver.t_end,
        steps_recorded: traj.diagnostics.len(),
        completed: traj.is_complete(),
        failure: traj.failure.as_ref().map(|f| FailureSummary {
            step: f.step,
            time: f.time,
            message: f.error.to_string(),
        }),
        matched: traj.matched,
        max_rho_drift: conservation.max_rho_drift,
        max_energy_drift: conservation.max_energy_drift,
        max_drift: conservation.max_drift(),
        max_analytic_deviation: traj.max_analytic_deviation(),
        final_time: traj.final_state().time(),
        final_rho: traj.final_state().moments().rho,
        final_energy: traj.final_state().moments().energy,
        final_temperature: traj
            .final_state()
            .moments()
            .temperature()
            .unwrap_or(f64::NAN),
        final_equilibrium: last.map(|d| d.params.to_string()),
        grid: GridSummary {
            rule: grid.rule().to_string(),
            n_nodes: grid.len(),
            r_max: grid.r_max(),
            tolerance: grid.tolerance(),
        },
        wall_time_seconds: wall,
    };

    fs::write(dir.join(CONFIG_ECHO_FILE), cfg.to_toml())
        .map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    write_timeseries(&dir.join(TIMESERIES_FILE), &traj, cfg.statistics)?;
    write_states(
        &dir.join(FINAL_STATE_FILE),
        &[
            ("f_initial", traj.initial_state()),
            ("f_final", traj.final_state()),
        ],
    )?;
    write_json(&dir.join(SUMMARY_FILE), &summary)?;

    Ok(RunOutcome {
        dir,
        summary,
        failure: traj.failure.map(|f| f.error),
    })
}

/// Where `equilibrium` takes its moments from.
#[derive(Debug, Clone)]
pub enum MomentSource {
    Given(MomentPair),
    Table(PathBuf),
}

#[derive(Debug, Clone)]
pub struct EquilibriumRequest {
    pub source: MomentSource,
    pub statistics: Statistics,
    pub rule: RuleKind,
    pub n_nodes: usize,
    pub r_max: Option<f64>,
    pub out: PathBuf,
}

#[derive(Debug, Clone)]
pub struct EquilibriumOutcome {
    pub moments: MomentPair,
    pub params: EquilibriumParams,
    pub out: PathBuf,
}

pub fn equilibrium(req: &EquilibriumRequest) -> Result<EquilibriumOutcome, CliError> {
    let grid = Arc::new(
        RadialGrid::new(req.rule, req.n_nodes, req.r_max)
            .map_err(|e| CliError::Config(e.to_string()))?,
    );
    let moments = match &req.source {
        MomentSource::Given(m) => *m,
        MomentSource::Table(path) => read_table(path, &grid)?.moments(),
    };
    println!("rho    = {}", fmt_f64(moments.rho));
    println!("energy = {}", fmt_f64(moments.energy));

    let bound = beta_upper_bound();
    if req.statistics == Statistics::BoseEinstein {
        let ratio = moments.degeneracy_ratio().map_err(CliError::Math)?;
        let admissible = ratio > 0.0 && ratio < bound;
        println!(
            "rho/(3T)^3 = {} (admissible below {}): {}",
            fmt_f64(ratio),
            fmt_f64(bound),
            if admissible { "ok" } else { "violated" }
        );
    }

    let params = build_equilibrium(moments, req.statistics, &SeriesTolerance::default())
        .map_err(CliError::Math)?;
    match params {
        EquilibriumParams::MaxwellBoltzmann { rho, temperature } => {
            println!("statistics = mb");
            println!("rho = {}", fmt_f64(rho));
            println!("T   = {}", fmt_f64(temperature));
        }
        EquilibriumParams::BoseEinstein { c, gamma } => {
            println!("statistics = be");
            println!("c     = {}", fmt_f64(c));
            println!("gamma = {}", fmt_f64(gamma));
        }
    }

    let j = params.sample(&grid, 0.0).map_err(CliError::Math)?;
    if let Some(parent) = req.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)
            .map_err(|e| CliError::Io(format!("{}: {e}", parent.display())))?;
    }
    write_states(&req.out, &[("j", &j)])?;
    println!("sampled J written to {}", req.out.display());
    Ok(EquilibriumOutcome {
        moments,
        params,
        out: req.out.clone(),
    })
}

pub fn verify(options: &VerifyOptions) -> Result<VerifyReport, CliError> {
    let report = run_all(options).map_err(|e| CliError::Config(e.to_string()))?;
    println!(
        "grid: {} rule, {} nodes, seed {:#x}",
        options.rule, options.n_nodes, options.seed
    );
    for check in &report.checks {
        println!("{check}");
    }
    let failed = report.failures().count();
    println!(
        "{} passed, {failed} failed in {:.2} s",
        report.checks.len() - failed,
        report.elapsed.as_secs_f64()
    );
    if failed > 0 {
        let names: Vec<&str> = report.failures().map(|c| c.name).collect();
        eprintln!("failing checks: {}", names.join(", "));
        return Err(CliError::VerifyFailed(failed));
    }
    Ok(report)
}

/// `*.toml` files directly inside `dir`, sorted by name.
pub fn sweep_configs(dir: &Path) -> Result<Vec<LoadedConfig>, CliError> {
    let entries =
        fs::read_dir(dir).map_err(|e| CliError::Config(format!("{}: {e}", dir.display())))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "toml"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(CliError::Config(format!(
            "no .toml configs in {}",
            dir.display()
        )));
    }
    let configs = paths
        .iter()
        .map(|p| LoadedConfig::load(p))
        .collect::<Result<Vec<_>, _>>()?;
    let mut seen = HashSet::new();
    for c in &configs {
        if !seen.insert(c.run_name()) {
            return Err(CliError::Config(format!(
                "two configs write to the same run directory `{}`",
                c.run_name()
            )));
        }
    }
    Ok(configs)
}

/// Per-config results of a sweep, keyed by run name.
pub type SweepResults = Vec<(String, Result<RunOutcome, CliError>)>;

/// Runs every config in `dir` concurrently. Configs are all parsed before
/// any run starts; each run writes to its own directory.
pub fn sweep(dir: &Path, out_root: &Path) -> Result<SweepResults, CliError> {
    let configs = sweep_configs(dir)?;
    let results = flrw_bgk::sweep::map(&configs, |c| {
        run_loaded(c, out_root).and_then(RunOutcome::into_result)
    });
    Ok(configs.iter().map(|c| c.run_name()).zip(results).collect())
}
