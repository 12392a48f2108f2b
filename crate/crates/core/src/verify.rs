//! Self-check suite behind the `verify` subcommand.
//!
//! Each check compares the solver against a closed-form or independently
//! summed reference. Random samples come from a seeded ChaCha stream, so a
//! report is reproducible for fixed [`VerifyOptions`].

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cosmology::{physical_moments, ScaleFactor};
use crate::dynamics::{simulate, SolverConfig, Stepper, Trajectory};
use crate::equilibrium::{
    beta, beta_derivative, beta_upper_bound, beta_value, build_equilibrium, global_equilibrium,
    solve_c, Statistics,
};
use crate::error::{Error, Result};
use crate::initial::{matched_to_global, Profile};
use crate::quadrature::{DistributionState, MomentPair, RadialGrid, RuleKind};
use crate::series::SeriesTolerance;

/// Tolerances pinned by the acceptance criteria.
pub mod limits {
    pub const ANALYTIC_DEVIATION: f64 = 1e-10;
    pub const MB_RUNTIME_SECS: f64 = 5.0;
    pub const BE_PARAMS: f64 = 1e-8;
    pub const BETA_LIMIT: f64 = 1e-10;
    pub const ROUND_TRIP: f64 = 1e-10;
    pub const DERIVATIVE: f64 = 1e-4;
    pub const DRIFT: f64 = 1e-10;
    pub const RK4_REDUCTION: f64 = 15.0;
    pub const EQUATION_OF_STATE: f64 = 1e-10;
    /// Multiple of the grid tolerance allowed for the matching conditions.
    pub const MATCHING_FACTOR: f64 = 10.0;
}

/// Sampling domain for random Bose-Einstein equilibria in the matching check.
/// `1/(e^{c+γr} - 1)` has a pole at `r = -c/γ`; once `c/γ` drops below about
/// 1 a 64-node Laguerre rule no longer meets its nominal tolerance, so the
/// samples keep `c/γ >= 1`.
pub const BE_SAMPLE_C: (f64, f64) = (1.0, 20.0);
pub const BE_SAMPLE_GAMMA: (f64, f64) = (0.5, 1.0);
pub const MB_SAMPLE_RHO: (f64, f64) = (1e-2, 1e2);
pub const MB_SAMPLE_T: (f64, f64) = (0.5, 2.0);

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub rule: RuleKind,
    pub n_nodes: usize,
    pub r_max: Option<f64>,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            rule: RuleKind::Exponential,
            n_nodes: 64,
            r_max: None,
            seed: 0x5eed_0001,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(
            f,
            "[{tag}] {:>2} {:<22} {}",
            self.id, self.name, self.detail
        )
    }
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub checks: Vec<CheckOutcome>,
    pub elapsed: Duration,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

type Check = (u8, &'static str, fn(&Context) -> Result<(bool, String)>);

const CHECKS: [Check; 9] = [
    (1, "analytic_mb", check_analytic_mb),
    (2, "analytic_be", check_analytic_be),
    (3, "beta_limit", check_beta_limit),
    (4, "monotone_inversion", check_monotone_inversion),
    (5, "beta_derivative", check_beta_derivative),
    (6, "conservation", check_conservation),
    (7, "geometry", check_geometry),
    (8, "matching_conditions", check_matching),
    (9, "apery_rejection", check_apery_rejection),
];

struct Context {
    grid: Arc<RadialGrid>,
    tol: SeriesTolerance,
    seed: u64,
}

impl Context {
    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

/// Runs every check. Grid construction errors are returned; a check that
/// errors internally is reported as failed with the error text.
pub fn run_all(options: &VerifyOptions) -> Result<VerifyReport> {
    let start = Instant::now();
    let ctx = Context {
        grid: Arc::new(RadialGrid::new(
            options.rule,
            options.n_nodes,
            options.r_max,
        )?),
        tol: SeriesTolerance::default(),
        seed: options.seed,
    };
    let checks = CHECKS
        .iter()
        .map(|&(id, name, run)| {
            let (passed, detail) = run(&ctx).unwrap_or_else(|e| (false, format!("error: {e}")));
            CheckOutcome {
                id,
                name,
                passed,
                detail,
            }
        })
        .collect();
    Ok(VerifyReport {
        checks,
        elapsed: start.elapsed(),
    })
}

/// The `a = 4/3` shell `r e^{-ar}` used by the analytic checks.
fn shell() -> Profile {
    Profile::GammaShell {
        amplitude: 1.0,
        power: 1.0,
        rate: 4.0 / 3.0,
    }
}

fn relaxation_config(stats: Statistics, stepper: Stepper, dt: f64, t_end: f64) -> SolverConfig {
    SolverConfig {
        dt,
        t_end,
        stepper,
        statistics: stats,
        ..SolverConfig::default()
    }
}

/// `max_{t, r} |F(t, r) - (e^{-t} F₀(r) + (1 - e^{-t}) j(r))|` over the
/// stored states.
fn max_deviation<J: Fn(f64) -> f64>(traj: &Trajectory, j: J) -> f64 {
    let f0 = traj.states[0].values();
    let nodes = traj.states[0].grid().nodes();
    let j = &j;
    traj.states
        .iter()
        .flat_map(|s| {
            let t = s.time();
            let decay = (-t).exp();
            s.values()
                .iter()
                .zip(f0)
                .zip(nodes)
                .map(move |((&f, &f0), &r)| (f - (decay * f0 + (1.0 - decay) * j(r))).abs())
        })
        .fold(0.0, f64::max)
}

fn mb_run(ctx: &Context) -> Result<(Trajectory, Duration)> {
    let f0 = matched_to_global(&shell(), &ctx.grid, Statistics::MaxwellBoltzmann)?;
    let start = Instant::now();
    let traj = simulate(
        &f0,
        &relaxation_config(
            Statistics::MaxwellBoltzmann,
            Stepper::ExactExponential,
            0.01,
            10.0,
        ),
    )?;
    Ok((traj, start.elapsed()))
}

fn check_analytic_mb(ctx: &Context) -> Result<(bool, String)> {
    let (traj, elapsed) = mb_run(ctx)?;
    if let Some(fail) = &traj.failure {
        return Ok((
            false,
            format!("run stopped at t = {}: {}", fail.time, fail.error),
        ));
    }
    let dev = max_deviation(&traj, |r| (-r).exp());
    let secs = elapsed.as_secs_f64();
    let ok = dev <= limits::ANALYTIC_DEVIATION && secs <= limits::MB_RUNTIME_SECS;
    Ok((
        ok,
        format!("max |F - F_exact| = {dev:.3e} (<= 1e-10), runtime {secs:.3} s (<= 5 s)"),
    ))
}

fn check_analytic_be(ctx: &Context) -> Result<(bool, String)> {
    let f0 = matched_to_global(&shell(), &ctx.grid, Statistics::BoseEinstein)?;
    let traj = simulate(
        &f0,
        &relaxation_config(
            Statistics::BoseEinstein,
            Stepper::ExactExponential,
            0.01,
            10.0,
        ),
    )?;
    if let Some(fail) = &traj.failure {
        return Ok((
            false,
            format!("run stopped at t = {}: {}", fail.time, fail.error),
        ));
    }
    let param_dev = traj
        .diagnostics
        .iter()
        .filter_map(|d| d.params.be_pair())
        .map(|(c, g)| (c - 1.0).abs().max((g - 1.0).abs()))
        .fold(0.0, f64::max);
    let dev = max_deviation(&traj, |r| 1.0 / (1.0 + r).exp_m1());
    let ok = param_dev <= limits::BE_PARAMS && dev <= limits::ANALYTIC_DEVIATION;
    Ok((
        ok,
        format!("max |(c, gamma) - (1, 1)| = {param_dev:.3e} (<= 1e-8), max |F - F_exact| = {dev:.3e} (<= 1e-10)"),
    ))
}

/// `ζ(3) = (5/2) Σ (-1)^{k+1} / (k³ C(2k, k))`.
fn zeta3_reference() -> f64 {
    let mut sum = 0.0;
    let mut binom = 1.0_f64;
    for k in 1..=40u32 {
        let kf = f64::from(k);
        binom *= (2.0 * kf - 1.0) * 2.0 / kf;
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        sum += sign / (kf.powi(3) * binom);
    }
    2.5 * sum
}

/// `(8π/27) ζ(3)⁴ / ζ(4)³` from independent values of `ζ(3)` and `ζ(4) = π⁴/90`.
pub fn beta_limit_reference() -> f64 {
    8.0 * PI / 27.0 * zeta3_reference().powi(4) / (PI.powi(4) / 90.0).powi(3)
}

fn check_beta_limit(ctx: &Context) -> Result<(bool, String)> {
    let reference = beta_limit_reference();
    let closed = beta_upper_bound();
    let near_zero = beta_value(1e-12, &ctx.tol)?.value;
    let err = (closed - reference)
        .abs()
        .max((near_zero - reference).abs());
    Ok((
        err <= limits::BETA_LIMIT,
        format!("beta(0+) = {closed:.13}, beta(1e-12) = {near_zero:.13}, reference {reference:.13}, error {err:.2e}"),
    ))
}

fn check_monotone_inversion(ctx: &Context) -> Result<(bool, String)> {
    let mut worst = 0.0_f64;
    for c in [0.05, 0.2, 1.0, 3.0, 10.0, 20.0] {
        let back = solve_c(beta(c, &ctx.tol)?, &ctx.tol)?;
        worst = worst.max((back - c).abs() / c);
    }
    let mut rng = ctx.rng(4);
    let mut violations = 0;
    for _ in 0..1000 {
        let a: f64 = rng.random_range(0.01..50.0);
        let b: f64 = rng.random_range(0.01..50.0);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        if lo == hi || beta(lo, &ctx.tol)? <= beta(hi, &ctx.tol)? {
            violations += 1;
        }
    }
    Ok((
        worst <= limits::ROUND_TRIP && violations == 0,
        format!("round-trip relative error {worst:.2e} (<= 1e-10), monotonicity violations {violations}/1000"),
    ))
}

fn check_beta_derivative(ctx: &Context) -> Result<(bool, String)> {
    let mut worst = 0.0_f64;
    for i in 0..20 {
        let c = 0.1 + (10.0 - 0.1) * f64::from(i) / 19.0;
        let h = 1e-4 * c;
        let fd = (beta(c + h, &ctx.tol)? - beta(c - h, &ctx.tol)?) / (2.0 * h);
        let d = beta_derivative(c, &ctx.tol)?;
        worst = worst.max((d - fd).abs() / fd.abs());
    }
    Ok((
        worst <= limits::DERIVATIVE,
        format!("max relative error vs centred differences {worst:.2e} (<= 1e-4)"),
    ))
}

fn grid_moments(state: &DistributionState) -> MomentPair {
    let grid = state.grid();
    let (mut rho, mut energy) = (0.0, 0.0);
    for ((&w, &r), &f) in grid.weights().iter().zip(grid.nodes()).zip(state.values()) {
        rho += w * r * r * f;
        energy += w * r * r * r * f;
    }
    MomentPair::new(4.0 * PI * rho, 4.0 * PI * energy)
}

fn rk4_error(f0: &DistributionState, dt: f64) -> Result<f64> {
    let t_end = 2.0;
    let traj = simulate(
        f0,
        &relaxation_config(Statistics::MaxwellBoltzmann, Stepper::Rk4, dt, t_end),
    )?;
    if let Some(fail) = traj.failure {
        return Err(fail.error);
    }
    let last = traj.final_state();
    let decay = (-t_end).exp();
    Ok(last
        .values()
        .iter()
        .zip(f0.values())
        .zip(last.grid().nodes())
        .map(|((&f, &g), &r)| (f - (decay * g + (1.0 - decay) * (-r).exp())).abs())
        .fold(0.0, f64::max))
}

fn check_conservation(ctx: &Context) -> Result<(bool, String)> {
    let (traj, _) = mb_run(ctx)?;
    let reference = grid_moments(&traj.states[0]);
    let drift = traj
        .states
        .iter()
        .map(|s| {
            let m = grid_moments(s);
            ((m.rho - reference.rho) / reference.rho)
                .abs()
                .max(((m.energy - reference.energy) / reference.energy).abs())
        })
        .fold(0.0, f64::max);
    let f0 = traj.states[0].clone();
    let coarse = rk4_error(&f0, 0.1)?;
    let fine = rk4_error(&f0, 0.05)?;
    let reduction = coarse / fine;
    Ok((
        drift <= limits::DRIFT && reduction >= limits::RK4_REDUCTION,
        format!(
            "max relative drift {drift:.2e} (<= 1e-10), rk4 error {coarse:.2e} -> {fine:.2e}, reduction {reduction:.2} (>= 15)"
        ),
    ))
}

fn check_geometry(ctx: &Context) -> Result<(bool, String)> {
    let mut rng = ctx.rng(7);
    let mut worst_geo = 0.0_f64;
    for _ in 0..100 {
        let c: f64 = rng.random_range(0.1..10.0);
        let t0: f64 = rng.random_range(0.01..10.0);
        let t: f64 = rng.random_range(0.0..100.0);
        let v = ScaleFactor::new(c, t0)?.eval(t)?;
        let s = t + t0;
        let h_ref = 0.5 / s;
        let res = v.geometric_residual().abs() / (h_ref * h_ref);
        let h_err = (v.hubble() - h_ref).abs() / h_ref;
        worst_geo = worst_geo.max(res).max(h_err);
    }

    let sf = ScaleFactor::new(1.3, 0.7)?;
    let mut shipped = vec![
        global_equilibrium(Statistics::MaxwellBoltzmann).sample(&ctx.grid, 0.0)?,
        global_equilibrium(Statistics::BoseEinstein).sample(&ctx.grid, 0.0)?,
    ];
    for stats in [Statistics::MaxwellBoltzmann, Statistics::BoseEinstein] {
        shipped.push(matched_to_global(&shell(), &ctx.grid, stats)?);
    }
    let mut worst_eos = 0.0_f64;
    for state in &shipped {
        for t in [0.0, 1.0, 10.0] {
            worst_eos =
                worst_eos.max(physical_moments(state, &sf, t)?.equation_of_state_residual());
        }
    }
    let geo_limit = 8.0 * f64::EPSILON;
    Ok((
        worst_geo <= geo_limit && worst_eos <= limits::EQUATION_OF_STATE,
        format!(
            "max |(R'/R)^2 + R''/R| / (R'/R)^2 = {worst_geo:.2e} (<= 8 eps), max |en - 3P|/(en) = {worst_eos:.2e} (<= 1e-10)"
        ),
    ))
}

/// `Σ_{k=1}^{K} e^{-ck} / k^s` with a fixed, generous number of terms.
fn polylog_direct(s: i32, c: f64) -> f64 {
    let terms = ((40.0 / c).ceil() as usize).max(64);
    (1..=terms)
        .rev()
        .map(|k| {
            let k = k as f64;
            (-c * k).exp() / k.powi(s)
        })
        .sum()
}

fn matching_deviation(ctx: &Context, m: MomentPair, stats: Statistics) -> Result<f64> {
    let j = build_equilibrium(m, stats, &ctx.tol)?.sample(&ctx.grid, 0.0)?;
    Ok(grid_moments(&j).relative_deviation(&m))
}

fn check_matching(ctx: &Context) -> Result<(bool, String)> {
    let limit = limits::MATCHING_FACTOR * ctx.grid.tolerance();
    let mut rng = ctx.rng(8);
    let mut worst_mb = 0.0_f64;
    for _ in 0..100 {
        let rho = (rng.random_range(MB_SAMPLE_RHO.0.ln()..MB_SAMPLE_RHO.1.ln())).exp();
        let t: f64 = rng.random_range(MB_SAMPLE_T.0..MB_SAMPLE_T.1);
        let m = MomentPair::new(rho, 3.0 * rho * t);
        worst_mb = worst_mb.max(matching_deviation(ctx, m, Statistics::MaxwellBoltzmann)?);
    }
    let mut worst_be = 0.0_f64;
    for _ in 0..100 {
        let c: f64 = rng.random_range(BE_SAMPLE_C.0..BE_SAMPLE_C.1);
        let gamma: f64 = rng.random_range(BE_SAMPLE_GAMMA.0..=BE_SAMPLE_GAMMA.1);
        let m = MomentPair::new(
            8.0 * PI * polylog_direct(3, c) / gamma.powi(3),
            24.0 * PI * polylog_direct(4, c) / gamma.powi(4),
        );
        worst_be = worst_be.max(matching_deviation(ctx, m, Statistics::BoseEinstein)?);
    }
    Ok((
        worst_mb <= limit && worst_be <= limit,
        format!(
            "max relative moment error mb {worst_mb:.2e}, be {worst_be:.2e} (<= {limit:.1e}; be sampled at c in [{}, {}], gamma in [{}, {}])",
            BE_SAMPLE_C.0, BE_SAMPLE_C.1, BE_SAMPLE_GAMMA.0, BE_SAMPLE_GAMMA.1
        ),
    ))
}

fn check_apery_rejection(ctx: &Context) -> Result<(bool, String)> {
    let bound = beta_limit_reference();
    let targets = [
        bound * (1.0 + 1e-12),
        bound * (1.0 + 1e-9),
        1.6,
        2.0,
        10.0,
        1e6,
    ];
    let mut rejected = 0;
    for &target in &targets {
        // ρ = 1 and E = 3ρT with ρ/(3T)³ = target.
        let m = MomentPair::new(1.0, (1.0 / target).cbrt());
        let direct = matches!(solve_c(target, &ctx.tol), Err(Error::AperyRange { .. }));
        let via_moments = matches!(
            build_equilibrium(m, Statistics::BoseEinstein, &ctx.tol),
            Err(Error::AperyRange { .. })
        );
        if direct && via_moments {
            rejected += 1;
        }
    }
    let at_bound = matches!(
        solve_c(beta_upper_bound(), &ctx.tol),
        Err(Error::AperyRange { .. })
    );
    Ok((
        rejected == targets.len() && at_bound,
        format!(
            "{rejected}/{} targets above {bound:.10} rejected, target = bound rejected: {at_bound}",
            targets.len()
        ),
    ))
}
