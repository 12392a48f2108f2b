//! Time integration of `∂ₜF = J(F) - F` in covariant momentum variables.
//!
//! `J(F)` is rebuilt from the current moments at every step (and every RK4
//! stage). Because `J(F)` carries the moments of `F`, both moments are
//! conserved and `J` stays at its initial value; for data that share the
//! moments of `J⁰` the solution is `e^{-t} F₀ + (1 - e^{-t}) J⁰`.

use std::fmt;
use std::str::FromStr;

use crate::equilibrium::{build_equilibrium, global_equilibrium, EquilibriumParams, Statistics};
use crate::error::{Error, Result};
use crate::quadrature::{DistributionState, MomentPair};
use crate::series::SeriesTolerance;

/// Upper bound on `t_end / dt`.
pub const MAX_STEPS: f64 = 1e7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stepper {
    /// `F ← e^{-dt} F + (1 - e^{-dt}) J(F)`.
    ExactExponential,
    /// Classical fourth-order Runge-Kutta on `J(F) - F`.
    Rk4,
}

impl fmt::Display for Stepper {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stepper::ExactExponential => f.write_str("exact"),
            Stepper::Rk4 => f.write_str("rk4"),
        }
    }
}

impl FromStr for Stepper {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "exact" | "exact-exponential" => Ok(Stepper::ExactExponential),
            "rk4" => Ok(Stepper::Rk4),
            other => Err(format!("unknown stepper `{other}` (expected exact|rk4)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_end: f64,
    pub stepper: Stepper,
    pub statistics: Statistics,
    pub tolerance: SeriesTolerance,
    /// Keep every `save_every`-th state (the last state is always kept).
    pub save_every: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            dt: 0.01,
            t_end: 10.0,
            stepper: Stepper::ExactExponential,
            statistics: Statistics::MaxwellBoltzmann,
            tolerance: SeriesTolerance::default(),
            save_every: 1,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.t_end.is_finite() && self.t_end > self.dt) {
            return Err(Error::InvalidConfig(format!(
                "t_end must exceed dt (t_end = {}, dt = {})",
                self.t_end, self.dt
            )));
        }
        if self.t_end / self.dt > MAX_STEPS {
            return Err(Error::InvalidConfig(format!(
                "t_end/dt = {:e} exceeds the step budget of {MAX_STEPS:e}",
                self.t_end / self.dt
            )));
        }
        if self.save_every == 0 {
            return Err(Error::InvalidConfig("save_every must be at least 1".into()));
        }
        Ok(())
    }

    /// Number of steps; the last one is shortened when `dt` does not divide
    /// `t_end`.
    pub fn n_steps(&self) -> usize {
        let q = self.t_end / self.dt;
        let nearest = q.round();
        if (q - nearest).abs() <= 1e-9 * q {
            nearest as usize
        } else {
            q.ceil() as usize
        }
    }

    fn time_at(&self, k: usize) -> f64 {
        if k >= self.n_steps() {
            self.t_end
        } else {
            k as f64 * self.dt
        }
    }
}

/// Per-step record: moments of `F(t)` and the equilibrium built from them.
#[derive(Debug, Clone, PartialEq)]
pub struct StepDiagnostics {
    pub time: f64,
    pub moments: MomentPair,
    pub temperature: f64,
    pub params: EquilibriumParams,
    /// `max |F - F_exact|` when the initial data share the moments of `J⁰`.
    pub linf_vs_analytic: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepFailure {
    pub step: usize,
    pub time: f64,
    pub error: Error,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub states: Vec<DistributionState>,
    pub diagnostics: Vec<StepDiagnostics>,
    pub failure: Option<StepFailure>,
    /// Whether `F₀` shares number and energy with `J⁰` on the grid.
    pub matched: bool,
}

impl Trajectory {
    pub fn initial_state(&self) -> &DistributionState {
        &self.states[0]
    }

    pub fn final_state(&self) -> &DistributionState {
        self.states
            .last()
            .expect("trajectory holds at least the initial state")
    }

    pub fn is_complete(&self) -> bool {
        self.failure.is_none()
    }

    pub fn max_analytic_deviation(&self) -> Option<f64> {
        if !self.matched {
            return None;
        }
        self.diagnostics
            .iter()
            .filter_map(|d| d.linf_vs_analytic)
            .reduce(f64::max)
    }
}

/// `J(F)` for the current moments, as parameters and node samples.
pub fn equilibrium_of(
    state: &DistributionState,
    stats: Statistics,
    tol: &SeriesTolerance,
) -> Result<(EquilibriumParams, DistributionState)> {
    let params = build_equilibrium(state.moments(), stats, tol)?;
    let j = params.sample(state.grid(), state.time())?;
    Ok((params, j))
}

/// Advances `state` by `dt`.
pub fn step(
    state: &DistributionState,
    dt: f64,
    stepper: Stepper,
    stats: Statistics,
    tol: &SeriesTolerance,
) -> Result<DistributionState> {
    let (_, j) = equilibrium_of(state, stats, tol)?;
    advance(state, &j, dt, stepper, stats, tol)
}

/// One step given `J(state)` already evaluated.
fn advance(
    state: &DistributionState,
    j: &DistributionState,
    dt: f64,
    stepper: Stepper,
    stats: Statistics,
    tol: &SeriesTolerance,
) -> Result<DistributionState> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "dt must be positive, got {dt}"
        )));
    }
    let t_next = state.time() + dt;
    match stepper {
        Stepper::ExactExponential => {
            let decay = (-dt).exp();
            let gain = -(-dt).exp_m1();
            let values = state
                .values()
                .iter()
                .zip(j.values())
                .map(|(&f, &jv)| decay * f + gain * jv)
                .collect();
            DistributionState::new(state.grid().clone(), values, t_next)
        }
        Stepper::Rk4 => {
            let grid = state.grid();
            let f = state.values();
            let rhs = |g: &[f64], jg: &[f64]| -> Vec<f64> {
                g.iter().zip(jg).map(|(gv, jv)| jv - gv).collect()
            };
            let shifted = |k: &[f64], h: f64| -> DistributionState {
                let v = f.iter().zip(k).map(|(fv, kv)| fv + h * kv).collect();
                DistributionState::from_parts_unchecked(grid.clone(), v, state.time())
            };
            let stage_j = |s: &DistributionState| -> Result<Vec<f64>> {
                let params = build_equilibrium(s.moments(), stats, tol)?;
                Ok(grid.nodes().iter().map(|&r| params.eval(r)).collect())
            };

            let k1 = rhs(f, j.values());
            let s2 = shifted(&k1, 0.5 * dt);
            let k2 = rhs(s2.values(), &stage_j(&s2)?);
            let s3 = shifted(&k2, 0.5 * dt);
            let k3 = rhs(s3.values(), &stage_j(&s3)?);
            let s4 = shifted(&k3, dt);
            let k4 = rhs(s4.values(), &stage_j(&s4)?);

            let values = (0..f.len())
                .map(|i| f[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
                .collect();
            DistributionState::new(grid.clone(), values, t_next)
        }
    }
}

/// `e^{-t} F₀ + (1 - e^{-t}) J⁰` together with how far `F₀` is from sharing
/// the moments of `J⁰`.
#[derive(Debug, Clone)]
pub struct AnalyticSolution {
    pub state: DistributionState,
    /// Relative moment mismatch between `F₀` and `J⁰`.
    pub moment_mismatch: f64,
}

impl AnalyticSolution {
    /// The explicit formula solves the equation only when `F₀` and `J⁰`
    /// share number and energy.
    pub fn hypothesis_holds(&self, rel_tol: f64) -> bool {
        self.moment_mismatch <= rel_tol
    }
}

pub fn analytic_solution(
    f0: &DistributionState,
    j0: &DistributionState,
    t: f64,
) -> Result<AnalyticSolution> {
    if !f0.same_grid(j0) {
        return Err(Error::GridMismatch);
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidTime(t));
    }
    let decay = (-t).exp();
    let gain = -(-t).exp_m1();
    let values = f0
        .values()
        .iter()
        .zip(j0.values())
        .map(|(&f, &j)| decay * f + gain * j)
        .collect();
    let state = DistributionState::new(f0.grid().clone(), values, t)?;
    let moment_mismatch = f0.moments().relative_deviation(&j0.moments());
    Ok(AnalyticSolution {
        state,
        moment_mismatch,
    })
}

/// Relative tolerance for treating initial data as moment-matched to `J⁰`.
pub fn matching_tolerance(state: &DistributionState) -> f64 {
    10.0 * state.grid().tolerance()
}

/// Integrates from `f0` to `config.t_end`.
///
/// Invalid configuration or initial data are errors. A failure to build
/// `J(F)` mid-run (for example, Bose-Einstein moments leaving the admissible
/// range) ends the trajectory early and is recorded in
/// [`Trajectory::failure`].
pub fn simulate(f0: &DistributionState, config: &SolverConfig) -> Result<Trajectory> {
    config.validate()?;
    let stats = config.statistics;
    let tol = &config.tolerance;
    let f0 = f0.clone().with_time(0.0);

    let j0 = global_equilibrium(stats).sample(f0.grid(), 0.0)?;
    let matched = f0.moments().relative_deviation(&j0.moments()) <= matching_tolerance(&f0);

    let n_steps = config.n_steps();
    let mut states = vec![f0.clone()];
    let mut diagnostics = Vec::with_capacity(n_steps + 1);
    let mut failure = None;
    let mut current = f0.clone();

    for k in 0..=n_steps {
        let time = config.time_at(k);
        let (params, j) = match equilibrium_of(&current, stats, tol) {
            Ok(v) => v,
            Err(error) => {
                failure = Some(StepFailure {
                    step: k,
                    time,
                    error,
                });
                break;
            }
        };
        let moments = current.moments();
        let linf_vs_analytic = if matched {
            Some(
                analytic_solution(&f0, &j0, time)?
                    .state
                    .linf_distance(&current)?,
            )
        } else {
            None
        };
        diagnostics.push(StepDiagnostics {
            time,
            moments,
            temperature: moments.temperature()?,
            params,
            linf_vs_analytic,
        });
        if k == n_steps {
            break;
        }

        let h = config.time_at(k + 1) - time;
        match advance(&current, &j, h, config.stepper, stats, tol) {
            Ok(next) => current = next.with_time(config.time_at(k + 1)),
            Err(error) => {
                failure = Some(StepFailure {
                    step: k,
                    time,
                    error,
                });
                break;
            }
        }
        if (k + 1) % config.save_every == 0 || k + 1 == n_steps {
            states.push(current.clone());
        }
    }

    Ok(Trajectory {
        states,
        diagnostics,
        failure,
        matched,
    })
}

/// Runs the iteration
///
/// `∂ₜF^{n+1} = J^n - F^{n+1}`, `F^{n+1}(0) = F₀`,
///
/// where `J^n(t)` is the equilibrium built from the moments of `F^n(t)` and
/// `F^0(t) = F₀`. Each iterate is integrated exactly on `t_grid` with `J^n`
/// interpolated linearly between grid times, which reduces to
/// `e^{-t} F₀ + (1 - e^{-t}) J^n` when `J^n` does not change in time.
///
/// Returns `F¹, …, F^{n_iters+1}`. The `params` column of iterate `n+1`
/// holds the driving equilibrium `J^n(t)`.
pub fn picard_iterate(
    f0: &DistributionState,
    n_iters: usize,
    stats: Statistics,
    tol: &SeriesTolerance,
    t_grid: &[f64],
) -> Result<Vec<Trajectory>> {
    validate_time_grid(t_grid)?;
    let f0 = f0.clone().with_time(0.0);
    let j_global = global_equilibrium(stats).sample(f0.grid(), 0.0)?;
    let matched = f0.moments().relative_deviation(&j_global.moments()) <= matching_tolerance(&f0);

    let mut previous: Vec<DistributionState> =
        t_grid.iter().map(|&t| f0.clone().with_time(t)).collect();
    let mut iterates = Vec::with_capacity(n_iters + 1);

    for n in 0..=n_iters {
        let mut driving = Vec::with_capacity(t_grid.len());
        for (state, &time) in previous.iter().zip(t_grid) {
            let pair = equilibrium_of(state, stats, tol).map_err(|e| Error::Iterate {
                iterate: n,
                time,
                source: Box::new(e),
            })?;
            driving.push(pair);
        }

        let mut states = Vec::with_capacity(t_grid.len());
        states.push(f0.clone());
        for (idx, window) in t_grid.windows(2).enumerate() {
            let h = window[1] - window[0];
            let decay = (-h).exp();
            let gain = -(-h).exp_m1();
            let ramp = (h + (-h).exp_m1()) / h;
            let ja = driving[idx].1.values();
            let jb = driving[idx + 1].1.values();
            let values = states[idx]
                .values()
                .iter()
                .zip(ja.iter().zip(jb))
                .map(|(&f, (&a, &b))| decay * f + gain * a + ramp * (b - a))
                .collect();
            states.push(DistributionState::new(
                f0.grid().clone(),
                values,
                window[1],
            )?);
        }

        let mut diagnostics = Vec::with_capacity(states.len());
        for (state, (params, _)) in states.iter().zip(&driving) {
            let moments = state.moments();
            let linf_vs_analytic = if matched {
                Some(
                    analytic_solution(&f0, &j_global, state.time())?
                        .state
                        .linf_distance(state)?,
                )
            } else {
                None
            };
            diagnostics.push(StepDiagnostics {
                time: state.time(),
                moments,
                temperature: moments.temperature()?,
                params: *params,
                linf_vs_analytic,
            });
        }

        iterates.push(Trajectory {
            states: states.clone(),
            diagnostics,
            failure: None,
            matched,
        });
        previous = states;
    }
    Ok(iterates)
}

fn validate_time_grid(t_grid: &[f64]) -> Result<()> {
    match t_grid.first() {
        None => return Err(Error::InvalidTimeGrid("time grid is empty")),
        Some(&t0) if t0 != 0.0 => return Err(Error::InvalidTimeGrid("time grid must start at 0")),
        _ => {}
    }
    if t_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidTimeGrid(
            "time grid contains non-finite values",
        ));
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidTimeGrid(
            "time grid must be strictly increasing",
        ));
    }
    Ok(())
}

/// Relative drift of the conserved moments along a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct ConservationReport {
    pub times: Vec<f64>,
    pub rho_drift: Vec<f64>,
    pub energy_drift: Vec<f64>,
    pub max_rho_drift: f64,
    pub max_energy_drift: f64,
    /// Index into `times` of the largest drift in either moment.
    pub worst_step: usize,
}

impl ConservationReport {
    pub fn max_drift(&self) -> f64 {
        self.max_rho_drift.max(self.max_energy_drift)
    }
}

pub fn conservation_report(traj: &Trajectory) -> ConservationReport {
    let samples: Vec<(f64, MomentPair)> = if traj.diagnostics.is_empty() {
        traj.states
            .iter()
            .map(|s| (s.time(), s.moments()))
            .collect()
    } else {
        traj.diagnostics
            .iter()
            .map(|d| (d.time, d.moments))
            .collect()
    };
    let reference = samples[0].1;
    let mut report = ConservationReport {
        times: Vec::with_capacity(samples.len()),
        rho_drift: Vec::with_capacity(samples.len()),
        energy_drift: Vec::with_capacity(samples.len()),
        max_rho_drift: 0.0,
        max_energy_drift: 0.0,
        worst_step: 0,
    };
    let mut worst = 0.0;
    for (i, (t, m)) in samples.iter().enumerate() {
        let dr = (m.rho - reference.rho).abs() / reference.rho;
        let de = (m.energy - reference.energy).abs() / reference.energy;
        report.times.push(*t);
        report.rho_drift.push(dr);
        report.energy_drift.push(de);
        report.max_rho_drift = report.max_rho_drift.max(dr);
        report.max_energy_drift = report.max_energy_drift.max(de);
        if dr.max(de) > worst {
            worst = dr.max(de);
            report.worst_step = i;
        }
    }
    report
}
