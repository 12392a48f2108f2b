//! Built-in initial-condition families.

use std::sync::Arc;

use crate::equilibrium::{be_eval, global_equilibrium, mb_eval, Statistics};
use crate::error::{Error, Result};
use crate::quadrature::{moment_match, DistributionState, MomentPair, RadialGrid};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    /// `ρ / (8πT³) e^{-r/T}`.
    Juttner { rho: f64, temperature: f64 },
    /// `A r^k e^{-a r}`.
    GammaShell {
        amplitude: f64,
        power: f64,
        rate: f64,
    },
    /// `1 / (e^{c + γ r} - 1)`.
    BoseJuttner { c: f64, gamma: f64 },
    /// `J⁰(r) (1 + ε exp(-((r - center)/width)²))` for the given statistics.
    Perturbed {
        statistics: Statistics,
        epsilon: f64,
        center: f64,
        width: f64,
    },
}

impl Profile {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        match *self {
            Profile::Juttner { rho, temperature } => {
                if !(rho > 0.0 && temperature > 0.0) {
                    return bad("juttner needs rho > 0 and T > 0");
                }
            }
            Profile::GammaShell {
                amplitude,
                power,
                rate,
            } => {
                if !(amplitude > 0.0 && power >= 0.0 && rate > 0.0) {
                    return bad("gamma_shell needs A > 0, k >= 0, a > 0");
                }
            }
            Profile::BoseJuttner { c, gamma } => {
                if !(c > 0.0 && gamma > 0.0) {
                    return bad("be_juttner needs c > 0 and gamma > 0");
                }
            }
            Profile::Perturbed {
                epsilon,
                width,
                center,
                ..
            } => {
                if !(epsilon > -1.0 && width > 0.0 && center.is_finite() && epsilon.is_finite()) {
                    return bad("perturbed needs epsilon > -1 and width > 0");
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            Profile::Juttner { rho, temperature } => mb_eval(rho, temperature, r),
            Profile::GammaShell {
                amplitude,
                power,
                rate,
            } => amplitude * r.powf(power) * (-rate * r).exp(),
            Profile::BoseJuttner { c, gamma } => be_eval(c, gamma, r),
            Profile::Perturbed {
                statistics,
                epsilon,
                center,
                width,
            } => {
                let x = (r - center) / width;
                global_equilibrium(statistics).eval(r) * (1.0 + epsilon * (-x * x).exp())
            }
        }
    }

    pub fn sample(&self, grid: &Arc<RadialGrid>) -> Result<DistributionState> {
        self.validate()?;
        DistributionState::from_fn(grid.clone(), |r| self.eval(r), 0.0)
    }

    /// Samples the profile rescaled so its grid moments equal `target`.
    pub fn matched(&self, grid: &Arc<RadialGrid>, target: MomentPair) -> Result<DistributionState> {
        self.validate()?;
        Ok(moment_match(grid, |r| self.eval(r), target)?.state)
    }
}

/// Grid moments of the global equilibrium `J⁰` for `stats`.
pub fn global_moments(grid: &Arc<RadialGrid>, stats: Statistics) -> Result<MomentPair> {
    Ok(global_equilibrium(stats).sample(grid, 0.0)?.moments())
}

/// `profile` moment-matched to `J⁰` on `grid`, i.e. admissible initial data
/// for the explicit relaxation solution.
pub fn matched_to_global(
    profile: &Profile,
    grid: &Arc<RadialGrid>,
    stats: Statistics,
) -> Result<DistributionState> {
    profile.matched(grid, global_moments(grid, stats)?)
}
