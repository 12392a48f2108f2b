//! Bracketed Newton iteration with bisection fallback.

use crate::error::{Error, Result};

/// Stopping rules for [`safeguarded_newton`].
#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions {
    /// Accept `x` once `|f(x)| <= f_tol`.
    pub f_tol: f64,
    /// Accept once the bracket is narrower than `x_tol_rel * |x|`.
    pub x_tol_rel: f64,
    pub max_iter: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            f_tol: 1e-14,
            x_tol_rel: 4.0 * f64::EPSILON,
            max_iter: 200,
        }
    }
}

/// Finds a root of `f` inside `[lo, hi]`, where `f(lo)` and `f(hi)` have
/// opposite signs.
///
/// `f` returns the value and the derivative. Newton steps that leave the
/// current bracket, or that come from a vanishing or non-finite derivative,
/// are replaced by bisection. The bracket shrinks on every evaluation.
pub fn safeguarded_newton<F>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    x0: f64,
    opts: &NewtonOptions,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<(f64, f64)>,
{
    let (f_lo, _) = f(lo)?;
    let (f_hi, _) = f(hi)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::RootNotBracketed {
            target: f64::NAN,
            lo,
            hi,
        });
    }
    let lo_sign = f_lo.signum();

    let mut x = if x0 > lo && x0 < hi {
        x0
    } else {
        0.5 * (lo + hi)
    };
    for _ in 0..opts.max_iter {
        let (fx, dfx) = f(x)?;
        if fx.abs() <= opts.f_tol {
            return Ok(x);
        }
        if fx.signum() == lo_sign {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= opts.x_tol_rel * x.abs() {
            return Ok(x);
        }
        let newton = x - fx / dfx;
        x = if dfx != 0.0 && newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    Err(Error::RootNoConvergence {
        iterations: opts.max_iter,
        last: x,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let root = safeguarded_newton(
            |x| Ok((x * x - 2.0, 2.0 * x)),
            0.0,
            2.0,
            1.0,
            &NewtonOptions::default(),
        )
        .unwrap();
        assert!((root - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn falls_back_to_bisection_on_flat_derivative() {
        // Zero derivative at the start point forces a bisection step.
        let root = safeguarded_newton(
            |x: f64| Ok(((x - 1.0).powi(3), 3.0 * (x - 1.0).powi(2))),
            -3.0,
            2.0,
            1.0 + 1e-300,
            &NewtonOptions {
                f_tol: 1e-30,
                ..NewtonOptions::default()
            },
        )
        .unwrap();
        assert!((root - 1.0).abs() < 1e-9);
    }

    #[test]
    fn survives_newton_overshoot() {
        // atan is the textbook case where plain Newton diverges from x = 2.
        let root = safeguarded_newton(
            |x: f64| Ok((x.atan(), 1.0 / (1.0 + x * x))),
            -5.0,
            10.0,
            2.0,
            &NewtonOptions::default(),
        )
        .unwrap();
        assert!(root.abs() < 1e-14);
    }

    #[test]
    fn unbracketed_is_an_error() {
        let r = safeguarded_newton(
            |x| Ok((x * x + 1.0, 2.0 * x)),
            -1.0,
            1.0,
            0.5,
            &NewtonOptions::default(),
        );
        assert!(matches!(r, Err(Error::RootNotBracketed { .. })));
    }

    #[test]
    fn reports_iteration_limit() {
        let r = safeguarded_newton(
            |x: f64| Ok((x - 0.3, 1e-300)),
            0.0,
            1.0,
            0.9,
            &NewtonOptions {
                f_tol: 0.0,
                x_tol_rel: 0.0,
                max_iter: 5,
            },
        );
        assert!(matches!(
            r,
            Err(Error::RootNoConvergence { iterations: 5, .. })
        ));
    }
}
