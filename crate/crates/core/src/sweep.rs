//! Batch evaluation over independent inputs.
//!
//! With the `parallel` feature (on by default) the batch entry points fan out
//! over the rayon pool; the `*_sequential` variants are always available and
//! produce identical results.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::dynamics::{simulate, SolverConfig, Trajectory};
use crate::equilibrium::{beta, build_equilibrium, EquilibriumParams, Statistics};
use crate::error::Result;
use crate::quadrature::{DistributionState, MomentPair};
use crate::series::SeriesTolerance;

/// Applies `f` to every item, in parallel when the `parallel` feature is on.
/// Output order matches input order.
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    let out = items.par_iter().map(f).collect();

    #[cfg(not(feature = "parallel"))]
    let out = items.iter().map(f).collect();

    out
}

pub fn map_sequential<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

/// One independent run of [`simulate`].
#[derive(Debug, Clone)]
pub struct SweepJob {
    pub initial: DistributionState,
    pub config: SolverConfig,
}

pub fn simulate_all(jobs: &[SweepJob]) -> Vec<Result<Trajectory>> {
    map(jobs, |job| simulate(&job.initial, &job.config))
}

pub fn simulate_all_sequential(jobs: &[SweepJob]) -> Vec<Result<Trajectory>> {
    map_sequential(jobs, |job| simulate(&job.initial, &job.config))
}

pub fn beta_table(cs: &[f64], tol: &SeriesTolerance) -> Vec<Result<f64>> {
    map(cs, |&c| beta(c, tol))
}

pub fn beta_table_sequential(cs: &[f64], tol: &SeriesTolerance) -> Vec<Result<f64>> {
    map_sequential(cs, |&c| beta(c, tol))
}

pub fn build_equilibria(
    moments: &[MomentPair],
    stats: Statistics,
    tol: &SeriesTolerance,
) -> Vec<Result<EquilibriumParams>> {
    map(moments, |&m| build_equilibrium(m, stats, tol))
}

pub fn build_equilibria_sequential(
    moments: &[MomentPair],
    stats: Statistics,
    tol: &SeriesTolerance,
) -> Vec<Result<EquilibriumParams>> {
    map_sequential(moments, |&m| build_equilibrium(m, stats, tol))
}
