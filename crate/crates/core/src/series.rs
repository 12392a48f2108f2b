//! Truncated series for Bose-Einstein integrals.
//!
//! `∫₀^∞ rⁿ / (e^{c+r} - 1) dr = n! Σ_{k≥1} e^{-ck} / k^{n+1} = n! Li_{n+1}(e^{-c})`.

use crate::error::{Error, Result};

/// Truncation controls for the polylogarithm series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesTolerance {
    abs_tol: f64,
    max_terms: usize,
}

impl SeriesTolerance {
    pub const MIN_ABS_TOL: f64 = 1e-15;
    pub const MIN_TERMS: usize = 10;

    pub fn new(abs_tol: f64, max_terms: usize) -> Result<Self> {
        if !(abs_tol.is_finite() && abs_tol >= Self::MIN_ABS_TOL) {
            return Err(Error::InvalidTolerance("abs_tol must be at least 1e-15"));
        }
        if max_terms < Self::MIN_TERMS {
            return Err(Error::InvalidTolerance("max_terms must be at least 10"));
        }
        Ok(SeriesTolerance { abs_tol, max_terms })
    }

    pub fn abs_tol(&self) -> f64 {
        self.abs_tol
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }
}

impl Default for SeriesTolerance {
    fn default() -> Self {
        SeriesTolerance {
            abs_tol: 1e-14,
            max_terms: 100_000,
        }
    }
}

/// `Σ_{k≥1} e^{-c(k-1)} / k^s = e^{c} Li_s(e^{-c})`.
///
/// The leading factor is stripped so that large `c` does not underflow.
/// Summation stops once the next term drops below `abs_tol` times the
/// running sum.
pub fn scaled_exp_polylog(s: u32, c: f64, tol: &SeriesTolerance) -> Result<f64> {
    if c.is_nan() || c <= 0.0 {
        return Err(Error::NonPositiveFugacity(c));
    }
    let z = (-c).exp();
    let exponent = s as i32;
    let mut zk = 1.0_f64;
    let mut sum = 0.0_f64;
    for k in 1..=tol.max_terms {
        sum += zk / (k as f64).powi(exponent);
        zk *= z;
        let next = zk / ((k + 1) as f64).powi(exponent);
        if next < tol.abs_tol * sum {
            return Ok(sum);
        }
    }
    Err(Error::SeriesBudgetExhausted {
        order: s,
        c,
        terms: tol.max_terms,
    })
}

/// `Li_s(e^{-c}) = Σ_{k≥1} e^{-ck} / k^s`.
pub fn exp_polylog(s: u32, c: f64, tol: &SeriesTolerance) -> Result<f64> {
    Ok((-c).exp() * scaled_exp_polylog(s, c, tol)?)
}

/// `∫₀^∞ rⁿ / (e^{c+r} - 1) dr = n! Σ e^{-ck} / k^{n+1}` for `n ≥ 2`, `c > 0`.
pub fn bose_series(n: u32, c: f64, tol: &SeriesTolerance) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidSeriesOrder { min: 2, got: n });
    }
    Ok(factorial(n) * exp_polylog(n + 1, c, tol)?)
}

pub(crate) fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Riemann zeta at integer `s ≥ 2`: a direct sum plus an Euler-Maclaurin
/// tail.
pub fn zeta(s: u32) -> f64 {
    assert!(s >= 2, "zeta(s) diverges for s < 2");
    const N: u32 = 64;
    let sf = s as f64;
    let head: f64 = (1..N).rev().map(|k| (k as f64).powf(-sf)).sum();
    let n = N as f64;
    let tail = n.powf(1.0 - sf) / (sf - 1.0) + 0.5 * n.powf(-sf) + sf / 12.0 * n.powf(-sf - 1.0)
        - sf * (sf + 1.0) * (sf + 2.0) / 720.0 * n.powf(-sf - 3.0)
        + sf * (sf + 1.0) * (sf + 2.0) * (sf + 3.0) * (sf + 4.0) / 30240.0 * n.powf(-sf - 5.0);
    head + tail
}
