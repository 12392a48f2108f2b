use thiserror::Error;

use crate::quadrature::RuleKind;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid node count {n} for {rule} rule: {reason}")]
    InvalidNodeCount {
        rule: RuleKind,
        n: usize,
        reason: &'static str,
    },

    #[error("cutoff radius must be positive and finite, got {0}")]
    NonPositiveCutoff(f64),

    #[error("the uniform rule requires a cutoff radius r_max")]
    MissingCutoff,

    #[error("distributions live on different grids")]
    GridMismatch,

    #[error("expected {expected} samples, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("distribution value {value} at node {index} is negative or not finite")]
    InvalidValue { index: usize, value: f64 },

    #[error("time stamp must be finite and nonnegative, got {0}")]
    InvalidTime(f64),

    #[error("moments must be positive (rho = {rho}, energy = {energy})")]
    NonPositiveMoments { rho: f64, energy: f64 },

    #[error("template distribution is identically zero")]
    ZeroTemplate,

    #[error("fugacity exponent c must be positive, got {0}")]
    NonPositiveFugacity(f64),

    #[error("series order must be at least {min}, got {got}")]
    InvalidSeriesOrder { min: u32, got: u32 },

    #[error("series of order {order} at c = {c} not converged after {terms} terms")]
    SeriesBudgetExhausted { order: u32, c: f64, terms: usize },

    #[error("invalid series tolerance: {0}")]
    InvalidTolerance(&'static str),

    #[error(
        "rho/(3T)^3 = {ratio:.17e} is outside the admissible range (0, {bound:.17e}); \
         no Bose-Einstein equilibrium with c > 0 exists"
    )]
    AperyRange { ratio: f64, bound: f64 },

    #[error("could not bracket root for target {target:e} within c in [{lo:e}, {hi:e}]")]
    RootNotBracketed { target: f64, lo: f64, hi: f64 },

    #[error("root finder did not converge in {iterations} iterations (last c = {last})")]
    RootNoConvergence { iterations: usize, last: f64 },

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid time grid: {0}")]
    InvalidTimeGrid(&'static str),

    #[error("iterate {iterate} at t = {time}: {source}")]
    Iterate {
        iterate: usize,
        time: f64,
        #[source]
        source: Box<Error>,
    },
}
