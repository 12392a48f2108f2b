//! FLRW background for massless particles.
//!
//! The scale factor is `R(t) = C (t + t₀)^{1/2}`. Free streaming follows
//! `dp/dt = -2 (Ṙ/R) p`, solved by `p(t) = R(t)^{-2} y`, where `y` is the
//! covariant momentum `v = R² p` (the momentum in the frame where `R = 1`).
//! The solver evolves `F` in `v`; everything in the physical `p`-frame here
//! is a derived view.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::DistributionState;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleFactor {
    c: f64,
    t0: f64,
}

/// `R`, `Ṙ` and `R̈` at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleFactorValue {
    pub r: f64,
    pub r_dot: f64,
    pub r_ddot: f64,
}

impl ScaleFactorValue {
    /// `Ṙ/R`.
    pub fn hubble(&self) -> f64 {
        self.r_dot / self.r
    }

    /// `(Ṙ/R)² + R̈/R`, identically zero for the radiation-era scale factor.
    pub fn geometric_residual(&self) -> f64 {
        let h = self.hubble();
        h * h + self.r_ddot / self.r
    }
}

impl ScaleFactor {
    pub fn new(c: f64, t0: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0 && t0.is_finite() && t0 > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "scale factor needs C > 0 and t0 > 0 (C = {c}, t0 = {t0})"
            )));
        }
        Ok(ScaleFactor { c, t0 })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    /// `R = C s^{1/2}`, `Ṙ = C / (2 s^{1/2})`, `R̈ = -C / (4 s^{3/2})` with
    /// `s = t + t₀`.
    pub fn eval(&self, t: f64) -> Result<ScaleFactorValue> {
        check_time(t)?;
        let s = t + self.t0;
        let root = s.sqrt();
        Ok(ScaleFactorValue {
            r: self.c * root,
            r_dot: self.c / (2.0 * root),
            r_ddot: -self.c / (4.0 * s * root),
        })
    }
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidTime(t))
    }
}

/// Momentum at time `t` on the characteristic through covariant momentum
/// `y`: `p(t) = R(t)^{-2} y`.
pub fn characteristic_map(y: [f64; 3], sf: &ScaleFactor, t: f64) -> Result<[f64; 3]> {
    let r2 = sf.eval(t)?.r.powi(2);
    Ok(y.map(|yi| yi / r2))
}

/// Radial form of [`characteristic_map`].
pub fn characteristic_radius(y: f64, sf: &ScaleFactor, t: f64) -> Result<f64> {
    Ok(y / sf.eval(t)?.r.powi(2))
}

/// `v = R(t)² p`.
pub fn covariant_momentum(p: [f64; 3], sf: &ScaleFactor, t: f64) -> Result<[f64; 3]> {
    let r2 = sf.eval(t)?.r.powi(2);
    Ok(p.map(|pi| pi * r2))
}

/// Right-hand side of the characteristic equation, `-2 (Ṙ/R) p`.
pub fn characteristic_velocity(p: [f64; 3], sf: &ScaleFactor, t: f64) -> Result<[f64; 3]> {
    let h = sf.eval(t)?.hubble();
    Ok(p.map(|pi| -2.0 * h * pi))
}

/// Number density, energy per particle and pressure in the physical frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalMoments {
    pub n: f64,
    pub e: f64,
    pub pressure: f64,
}

impl PhysicalMoments {
    /// `|e n - 3P| / (e n)`; zero for massless particles.
    pub fn equation_of_state_residual(&self) -> f64 {
        let en = self.e * self.n;
        (en - 3.0 * self.pressure).abs() / en
    }
}

/// Physical moments of a distribution stored in covariant variables.
///
/// Changing variables `p = v / R²` in the `p`-frame integrals gives
/// `n = R⁻³ ∫F dv`, `e = R⁻¹ ∫|v|F dv / ∫F dv`, `P = (3R⁴)⁻¹ ∫|v|F dv`.
pub fn physical_moments(
    state: &DistributionState,
    sf: &ScaleFactor,
    t: f64,
) -> Result<PhysicalMoments> {
    let r = sf.eval(t)?.r;
    let m = state.moments();
    if !m.is_positive() {
        return Err(Error::NonPositiveMoments {
            rho: m.rho,
            energy: m.energy,
        });
    }
    Ok(PhysicalMoments {
        n: m.rho / r.powi(3),
        e: m.energy / m.rho / r,
        pressure: m.energy / (3.0 * r.powi(4)),
    })
}

/// Residuals of the Friedmann and acceleration equations,
/// `(Ṙ/R)² - (8π/3) e n` and `R̈/R + (4π/3)(e n + 3P)`.
///
/// The background is prescribed, so these are diagnostics only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FriedmannResiduals {
    pub friedmann: f64,
    pub acceleration: f64,
}

pub fn friedmann_residuals(
    state: &DistributionState,
    sf: &ScaleFactor,
    t: f64,
) -> Result<FriedmannResiduals> {
    let a = sf.eval(t)?;
    let pm = physical_moments(state, sf, t)?;
    let en = pm.e * pm.n;
    Ok(FriedmannResiduals {
        friedmann: a.hubble().powi(2) - 8.0 * PI / 3.0 * en,
        acceleration: a.r_ddot / a.r + 4.0 * PI / 3.0 * (en + 3.0 * pm.pressure),
    })
}

/// Factor `s` such that `s·F` sources the prescribed expansion at time `t`,
/// i.e. `(8π/3) e n = (Ṙ/R)²`.
pub fn friedmann_calibration(state: &DistributionState, sf: &ScaleFactor, t: f64) -> Result<f64> {
    let a = sf.eval(t)?;
    let pm = physical_moments(state, sf, t)?;
    Ok(3.0 * a.hubble().powi(2) / (8.0 * PI * pm.e * pm.n))
}
