//! Jüttner equilibria for massless particles in covariant momentum variables.
//!
//! Maxwell-Boltzmann: `J(r) = ρ / (8πT³) · e^{-r/T}` with `ρ = ∫F dv`,
//! `3T = ∫|v|F dv / ρ`. Closed form, nothing to solve.
//!
//! Bose-Einstein: `J(r) = 1 / (e^{c + γr} - 1)` where `c` inverts
//! `β(c) = ρ / (3T)³` and `γ = ρ^{-1/3} (∫ dv / (e^{c+|v|} - 1))^{1/3}`.
//! `β` is strictly decreasing on `(0, ∞)` with range `(0, β(0⁺))`, so the
//! inversion is unique whenever `ρ/(3T)³` lies in that range.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::{DistributionState, MomentPair, RadialGrid};
use crate::roots::{safeguarded_newton, NewtonOptions};
use crate::series::{scaled_exp_polylog, zeta, SeriesTolerance};

pub use crate::series::bose_series;

/// Below this `c` the series are replaced by their first-order expansion
/// around `c = 0`.
pub const SMALL_C: f64 = 1e-4;
/// Bracket limits for the `c` solve.
pub const C_FLOOR: f64 = 1e-6;
pub const C_CAP: f64 = 1e3;

const BETA_PREFACTOR: f64 = 8.0 * PI / 27.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Statistics {
    MaxwellBoltzmann,
    BoseEinstein,
}

impl fmt::Display for Statistics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statistics::MaxwellBoltzmann => f.write_str("mb"),
            Statistics::BoseEinstein => f.write_str("be"),
        }
    }
}

impl FromStr for Statistics {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "mb" | "maxwell-boltzmann" => Ok(Statistics::MaxwellBoltzmann),
            "be" | "bose-einstein" => Ok(Statistics::BoseEinstein),
            other => Err(format!("unknown statistics `{other}` (expected mb|be)")),
        }
    }
}

/// Parameters that fully determine `J(F)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EquilibriumParams {
    MaxwellBoltzmann { rho: f64, temperature: f64 },
    BoseEinstein { c: f64, gamma: f64 },
}

impl EquilibriumParams {
    pub fn statistics(&self) -> Statistics {
        match self {
            EquilibriumParams::MaxwellBoltzmann { .. } => Statistics::MaxwellBoltzmann,
            EquilibriumParams::BoseEinstein { .. } => Statistics::BoseEinstein,
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            EquilibriumParams::MaxwellBoltzmann { rho, temperature } => {
                mb_eval(rho, temperature, r)
            }
            EquilibriumParams::BoseEinstein { c, gamma } => be_eval(c, gamma, r),
        }
    }

    pub fn sample(&self, grid: &Arc<RadialGrid>, time: f64) -> Result<DistributionState> {
        DistributionState::from_fn(grid.clone(), |r| self.eval(r), time)
    }

    /// `(c, γ)` for Bose-Einstein parameters.
    pub fn be_pair(&self) -> Option<(f64, f64)> {
        match *self {
            EquilibriumParams::BoseEinstein { c, gamma } => Some((c, gamma)),
            _ => None,
        }
    }
}

impl fmt::Display for EquilibriumParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EquilibriumParams::MaxwellBoltzmann { rho, temperature } => {
                write!(f, "rho = {rho:.17e}, T = {temperature:.17e}")
            }
            EquilibriumParams::BoseEinstein { c, gamma } => {
                write!(f, "c = {c:.17e}, gamma = {gamma:.17e}")
            }
        }
    }
}

/// The global equilibrium `J⁰`: `e^{-r}` (MB) or `1/(e^{1+r} - 1)` (BE).
pub fn global_equilibrium(stats: Statistics) -> EquilibriumParams {
    match stats {
        Statistics::MaxwellBoltzmann => EquilibriumParams::MaxwellBoltzmann {
            rho: 8.0 * PI,
            temperature: 1.0,
        },
        Statistics::BoseEinstein => EquilibriumParams::BoseEinstein { c: 1.0, gamma: 1.0 },
    }
}

pub fn mb_eval(rho: f64, temperature: f64, r: f64) -> f64 {
    rho / (8.0 * PI * temperature.powi(3)) * (-r / temperature).exp()
}

pub fn be_eval(c: f64, gamma: f64, r: f64) -> f64 {
    1.0 / (c + gamma * r).exp_m1()
}

/// Scaled sums `e^{c} Li_s(e^{-c})` for `s = 2, 3, 4`.
#[derive(Debug, Clone, Copy)]
struct ScaledSums {
    s2: f64,
    s3: f64,
    s4: f64,
    approximate: bool,
}

fn scaled_sums(c: f64, tol: &SeriesTolerance, with_s2: bool) -> Result<ScaledSums> {
    if c.is_nan() || c <= 0.0 {
        return Err(Error::NonPositiveFugacity(c));
    }
    if c < SMALL_C {
        // Li_s(e^{-c}) ≈ ζ(s) - ζ(s-1) c, and Li_2(e^{-c}) ≈ ζ(2) + c ln c - c.
        let (z2, z3, z4) = (zeta(2), zeta(3), zeta(4));
        let lift = c.exp();
        return Ok(ScaledSums {
            s2: lift * (z2 + c * c.ln() - c),
            s3: lift * (z3 - z2 * c),
            s4: lift * (z4 - z3 * c),
            approximate: true,
        });
    }
    Ok(ScaledSums {
        s2: if with_s2 {
            scaled_exp_polylog(2, c, tol)?
        } else {
            f64::NAN
        },
        s3: scaled_exp_polylog(3, c, tol)?,
        s4: scaled_exp_polylog(4, c, tol)?,
        approximate: false,
    })
}

/// `β(c)` together with a flag marking the small-`c` expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaValue {
    pub value: f64,
    pub approximate: bool,
}

/// `ln β(c) = ln(8π/27) - c + 4 ln S₃ - 3 ln S₄`, finite for every `c > 0`.
fn ln_beta_from(c: f64, s: &ScaledSums) -> f64 {
    BETA_PREFACTOR.ln() - c + 4.0 * s.s3.ln() - 3.0 * s.s4.ln()
}

/// `d ln β / dc = (3 Li₃² - 4 Li₂ Li₄) / (Li₃ Li₄)`.
fn log_slope_from(s: &ScaledSums) -> f64 {
    (3.0 * s.s3 * s.s3 - 4.0 * s.s2 * s.s4) / (s.s3 * s.s4)
}

pub fn beta_value(c: f64, tol: &SeriesTolerance) -> Result<BetaValue> {
    let s = scaled_sums(c, tol, false)?;
    Ok(BetaValue {
        value: ln_beta_from(c, &s).exp(),
        approximate: s.approximate,
    })
}

/// `β(c) = (8π/27) (Σ e^{-ck}/k³)⁴ / (Σ e^{-ck}/k⁴)³`.
pub fn beta(c: f64, tol: &SeriesTolerance) -> Result<f64> {
    beta_value(c, tol).map(|b| b.value)
}

/// `dβ/dc = β(c) (3 Li₃² - 4 Li₂ Li₄) / (Li₃ Li₄)`, strictly negative.
pub fn beta_derivative(c: f64, tol: &SeriesTolerance) -> Result<f64> {
    let s = scaled_sums(c, tol, true)?;
    Ok(ln_beta_from(c, &s).exp() * log_slope_from(&s))
}

/// `lim_{c→0⁺} β(c) = (8π/27) ζ(3)⁴ / ζ(4)³ ≈ 1.5328698`, the supremum of
/// admissible `ρ/(3T)³`.
pub fn beta_upper_bound() -> f64 {
    let z3 = zeta(3);
    let z4 = zeta(4);
    BETA_PREFACTOR * z3.powi(4) / z4.powi(3)
}

/// Inverts `β(c) = target` for `c > 0`.
///
/// The root is bracketed by doubling or halving from `c = 1`, then polished
/// with safeguarded Newton on `ln β(c) - ln target`. Converged when
/// `|β(c) - target| <= abs_tol · target` (to first order).
pub fn solve_c(target: f64, tol: &SeriesTolerance) -> Result<f64> {
    let bound = beta_upper_bound();
    if !(target > 0.0 && target < bound) {
        return Err(Error::AperyRange {
            ratio: target,
            bound,
        });
    }
    let ln_target = target.ln();
    let g = |c: f64| -> Result<(f64, f64)> {
        let s = scaled_sums(c, tol, true)?;
        Ok((ln_beta_from(c, &s) - ln_target, log_slope_from(&s)))
    };

    let (g1, _) = g(1.0)?;
    if g1 == 0.0 {
        return Ok(1.0);
    }
    let (lo, hi) = if g1 > 0.0 {
        let mut lo = 1.0;
        let mut hi = 2.0;
        while g(hi)?.0 > 0.0 {
            if hi >= C_CAP {
                return Err(Error::RootNotBracketed {
                    target,
                    lo: 1.0,
                    hi: C_CAP,
                });
            }
            lo = hi;
            hi = (2.0 * hi).min(C_CAP);
        }
        (lo, hi)
    } else {
        let mut hi = 1.0;
        let mut lo = 0.5;
        while g(lo)?.0 < 0.0 {
            if lo <= C_FLOOR {
                return Err(Error::RootNotBracketed {
                    target,
                    lo: C_FLOOR,
                    hi: 1.0,
                });
            }
            hi = lo;
            lo = (0.5 * lo).max(C_FLOOR);
        }
        (lo, hi)
    };

    // For large c, ln β ≈ ln(8π/27) - c.
    let guess = BETA_PREFACTOR.ln() - ln_target;
    let opts = NewtonOptions {
        f_tol: tol.abs_tol(),
        ..NewtonOptions::default()
    };
    safeguarded_newton(g, lo, hi, guess, &opts).map_err(|e| match e {
        Error::RootNotBracketed { lo, hi, .. } => Error::RootNotBracketed { target, lo, hi },
        other => other,
    })
}

/// `γ = ρ^{-1/3} (4π · 2! Li₃(e^{-c}))^{1/3}`.
pub fn gamma_from(c: f64, rho: f64, tol: &SeriesTolerance) -> Result<f64> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::NonPositiveMoments {
            rho,
            energy: f64::NAN,
        });
    }
    let integral = 4.0 * PI * bose_series(2, c, tol)?;
    Ok((integral / rho).cbrt())
}

/// Determines `J(F)` from the moments of `F`.
pub fn build_equilibrium(
    m: MomentPair,
    stats: Statistics,
    tol: &SeriesTolerance,
) -> Result<EquilibriumParams> {
    if !m.is_positive() {
        return Err(Error::NonPositiveMoments {
            rho: m.rho,
            energy: m.energy,
        });
    }
    match stats {
        Statistics::MaxwellBoltzmann => Ok(EquilibriumParams::MaxwellBoltzmann {
            rho: m.rho,
            temperature: m.temperature()?,
        }),
        Statistics::BoseEinstein => {
            let c = solve_c(m.degeneracy_ratio()?, tol)?;
            let gamma = gamma_from(c, m.rho, tol)?;
            Ok(EquilibriumParams::BoseEinstein { c, gamma })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::RuleKind;
    use crate::series::{exp_polylog, scaled_exp_polylog};
    use proptest::prelude::*;

    fn tol() -> SeriesTolerance {
        SeriesTolerance::default()
    }

    /// Li_s(e^{-c}) by plain summation, independent of the truncation logic.
    fn li_direct(s: i32, c: f64) -> f64 {
        (1..=200_000)
            .rev()
            .map(|k| (-c * k as f64).exp() / (k as f64).powi(s))
            .sum()
    }

    fn beta_direct(c: f64) -> f64 {
        8.0 * PI / 27.0 * li_direct(3, c).powi(4) / li_direct(4, c).powi(3)
    }

    #[test]
    fn mb_eval_values() {
        assert!((mb_eval(8.0 * PI, 1.0, 0.0) - 1.0).abs() < 1e-15);
        assert!((mb_eval(8.0 * PI, 1.0, 1.0) - (-1f64).exp()).abs() < 1e-15);
        assert!((mb_eval(16.0 * PI, 1.0, 0.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn be_eval_values() {
        let e = 1f64.exp();
        assert!((be_eval(1.0, 1.0, 0.0) - 1.0 / (e - 1.0)).abs() < 1e-15);
        assert!((be_eval(1.0, 1.0, 0.0) - 0.581_977).abs() < 1e-6);
        assert!((be_eval(1.0, 1.0, 1.0) - 0.156_518).abs() < 1e-6);
        let mut prev = f64::INFINITY;
        for c in [1.0, 5.0, 20.0, 100.0, 800.0] {
            let v = be_eval(c, 1.0, 0.5);
            assert!(v < prev && v >= 0.0);
            prev = v;
        }
    }

    #[test]
    fn beta_at_one_matches_direct_summation() {
        let b = beta(1.0, &tol()).unwrap();
        let reference = 0.389_535_053_476_359;
        assert!((b - reference).abs() < 1e-13 * reference, "{b}");
        assert!((beta_direct(1.0) - reference).abs() < 1e-13 * reference);
    }

    #[test]
    fn beta_upper_bound_value() {
        assert!((beta_upper_bound() - 1.532_869_767_982_830_4).abs() < 1e-14);
        let b = beta_value(1e-6, &tol()).unwrap();
        assert!(b.approximate);
        assert!(b.value < beta_upper_bound());
        assert!((b.value - beta_upper_bound()).abs() < 1e-4);
    }

    #[test]
    fn beta_tends_to_zero_for_large_c() {
        let b = beta(200.0, &tol()).unwrap();
        assert!(b > 0.0 && b < 1e-80);
        let b = beta(900.0, &tol()).unwrap();
        assert!((0.0..1e-300).contains(&b));
    }

    #[test]
    fn beta_derivative_matches_finite_difference_at_one() {
        let h = 1e-5;
        let fd = (beta(1.0 + h, &tol()).unwrap() - beta(1.0 - h, &tol()).unwrap()) / (2.0 * h);
        let d = beta_derivative(1.0, &tol()).unwrap();
        assert!(d < 0.0);
        assert!((d - fd).abs() <= 1e-6f64.max(1e-4 * d.abs()), "{d} vs {fd}");
    }

    #[test]
    fn beta_derivative_negative_and_asymptotic() {
        for c in [0.1, 1.0, 5.0] {
            assert!(beta_derivative(c, &tol()).unwrap() < 0.0);
        }
        let d = beta_derivative(20.0, &tol()).unwrap();
        let b = beta(20.0, &tol()).unwrap();
        assert!((d / -b - 1.0).abs() < 1e-6);
    }

    #[test]
    fn solve_c_round_trips() {
        for c in [0.05, 0.5, 1.0, 5.0, 20.0] {
            let target = beta(c, &tol()).unwrap();
            let solved = solve_c(target, &tol()).unwrap();
            assert!((solved / c - 1.0).abs() < 1e-10, "{c}: {solved}");
        }
    }

    #[test]
    fn solve_c_rejects_out_of_range() {
        let bound = beta_upper_bound();
        for target in [1.6, bound, 0.0, -1.0] {
            match solve_c(target, &tol()) {
                Err(Error::AperyRange { ratio, bound: b }) => {
                    assert_eq!(ratio, target);
                    assert_eq!(b, bound);
                }
                other => panic!("unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn solve_c_from_global_equilibrium_moments() {
        let rho = 8.0 * PI * exp_polylog(3, 1.0, &tol()).unwrap();
        let energy = 24.0 * PI * exp_polylog(4, 1.0, &tol()).unwrap();
        let m = MomentPair::new(rho, energy);
        let c = solve_c(m.degeneracy_ratio().unwrap(), &tol()).unwrap();
        assert!((c - 1.0).abs() < 1e-10);
        assert!((m.temperature().unwrap() - 0.974_27).abs() < 1e-5);
    }

    #[test]
    fn gamma_from_examples() {
        let li3 = exp_polylog(3, 1.0, &tol()).unwrap();
        let g = gamma_from(1.0, 8.0 * PI * li3, &tol()).unwrap();
        assert!((g - 1.0).abs() < 1e-14);
        let g = gamma_from(1.0, 8.0 * 8.0 * PI * li3, &tol()).unwrap();
        assert!((g - 0.5).abs() < 1e-14);
        let rho = 4.0 * PI * bose_series(2, 2.0, &tol()).unwrap();
        assert!((gamma_from(2.0, rho, &tol()).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn build_equilibrium_examples() {
        let m = MomentPair::new(8.0 * PI, 24.0 * PI);
        match build_equilibrium(m, Statistics::MaxwellBoltzmann, &tol()).unwrap() {
            EquilibriumParams::MaxwellBoltzmann { rho, temperature } => {
                assert_eq!(rho, 8.0 * PI);
                assert!((temperature - 1.0).abs() < 1e-15);
            }
            other => panic!("{other:?}"),
        }

        let ratio = m.degeneracy_ratio().unwrap();
        assert!((ratio - 8.0 * PI / 27.0).abs() < 1e-14);
        let params = build_equilibrium(m, Statistics::BoseEinstein, &tol()).unwrap();
        let (c, gamma) = params.be_pair().unwrap();
        assert!(c > 0.0 && gamma > 0.0);
        // The series moments of 1/(e^{c+γr}-1) reproduce the input.
        let rho = 8.0 * PI * exp_polylog(3, c, &tol()).unwrap() / gamma.powi(3);
        let energy = 24.0 * PI * exp_polylog(4, c, &tol()).unwrap() / gamma.powi(4);
        assert!((rho / m.rho - 1.0).abs() < 1e-12);
        assert!((energy / m.energy - 1.0).abs() < 1e-12);
    }

    #[test]
    fn build_equilibrium_on_grid_reproduces_moments() {
        let grid = Arc::new(RadialGrid::new(RuleKind::Exponential, 64, None).unwrap());
        let m = MomentPair::new(8.0 * PI, 24.0 * PI);
        let j = build_equilibrium(m, Statistics::MaxwellBoltzmann, &tol())
            .unwrap()
            .sample(&grid, 0.0)
            .unwrap();
        assert!(j.moments().relative_deviation(&m) <= 10.0 * grid.tolerance());

        let j_be = global_equilibrium(Statistics::BoseEinstein)
            .sample(&grid, 0.0)
            .unwrap();
        let m_be = j_be.moments();
        let j = build_equilibrium(m_be, Statistics::BoseEinstein, &tol())
            .unwrap()
            .sample(&grid, 0.0)
            .unwrap();
        assert!(j.moments().relative_deviation(&m_be) <= 10.0 * grid.tolerance());
    }

    #[test]
    fn small_c_equilibria_need_a_finer_grid() {
        // (8π, 24π) gives c ≈ 0.303; the pole of 1/(e^{c+γr} - 1) at r = -c/γ
        // limits Gauss-Laguerre accuracy, so 64 nodes are not enough.
        let m = MomentPair::new(8.0 * PI, 24.0 * PI);
        let params = build_equilibrium(m, Statistics::BoseEinstein, &tol()).unwrap();
        let (c, _) = params.be_pair().unwrap();
        assert!((c - 0.303_308_097_708_309_85).abs() < 1e-10);
        let coarse = Arc::new(RadialGrid::new(RuleKind::Exponential, 64, None).unwrap());
        let fine = Arc::new(RadialGrid::new(RuleKind::Exponential, 160, None).unwrap());
        let dev = |g: &Arc<RadialGrid>| {
            params
                .sample(g, 0.0)
                .unwrap()
                .moments()
                .relative_deviation(&m)
        };
        assert!(dev(&coarse) > 10.0 * coarse.tolerance());
        assert!(dev(&fine) <= 10.0 * fine.tolerance());
    }

    #[test]
    fn nonpositive_moments_are_rejected() {
        for stats in [Statistics::MaxwellBoltzmann, Statistics::BoseEinstein] {
            assert!(matches!(
                build_equilibrium(MomentPair::new(0.0, 1.0), stats, &tol()),
                Err(Error::NonPositiveMoments { .. })
            ));
        }
    }

    #[test]
    fn statistics_parse() {
        assert_eq!(
            "mb".parse::<Statistics>().unwrap(),
            Statistics::MaxwellBoltzmann
        );
        assert_eq!(
            "BE".parse::<Statistics>().unwrap(),
            Statistics::BoseEinstein
        );
        assert!("fd".parse::<Statistics>().is_err());
    }

    proptest! {
        #[test]
        fn beta_strictly_decreasing(a in 0.01f64..50.0, b in 0.01f64..50.0) {
            prop_assume!((a - b).abs() > 1e-9);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(beta(lo, &tol()).unwrap() > beta(hi, &tol()).unwrap());
        }

        #[test]
        fn cauchy_schwarz_certificate(c in 0.01f64..50.0) {
            // Scaled sums share the factor e^{-c}; for large c the two sides
            // agree to rounding, hence the few-ulp allowance.
            let t = tol();
            let s2 = scaled_exp_polylog(2, c, &t).unwrap();
            let s3 = scaled_exp_polylog(3, c, &t).unwrap();
            let s4 = scaled_exp_polylog(4, c, &t).unwrap();
            prop_assert!(s3 * s3 <= s2 * s4 * (1.0 + 4.0 * f64::EPSILON));
        }

        #[test]
        fn beta_within_range(c in 1e-4f64..100.0) {
            let b = beta(c, &tol()).unwrap();
            prop_assert!(b > 0.0 && b < beta_upper_bound());
        }
    }
}
