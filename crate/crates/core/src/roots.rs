//! Scalar root finding on a known bracket.

use crate::error::{Error, Result};

const MAX_ITER: usize = 200;

/// Root of an increasing function on `[lo, hi]` with `f(lo) < 0 < f(hi)`.
///
/// `f` returns the value and derivative. Newton steps are taken when they stay
/// inside the current bracket and shrink it fast enough; otherwise the step
/// falls back to bisection, so convergence is never worse than bisection.
pub fn safeguarded_newton<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<(f64, f64)>,
{
    if !(lo < hi) {
        return Err(Error::numeric(format!("empty bracket [{lo}, {hi}]")));
    }
    let (f_lo, _) = f(lo)?;
    let (f_hi, _) = f(hi)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if !(f_lo < 0.0 && f_hi > 0.0) {
        return Err(Error::numeric(format!(
            "bracket [{lo}, {hi}] does not straddle a root: f = ({f_lo}, {f_hi})"
        )));
    }

    let mut x = 0.5 * (lo + hi);
    let mut last_step = hi - lo;
    for _ in 0..MAX_ITER {
        let (fx, dfx) = f(x)?;
        if fx == 0.0 {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= tol {
            return Ok(0.5 * (lo + hi));
        }
        let newton = x - fx / dfx;
        let step = (newton - x).abs();
        let next = if dfx > 0.0 && newton > lo && newton < hi && step < 0.5 * last_step {
            newton
        } else {
            0.5 * (lo + hi)
        };
        last_step = (next - x).abs();
        if last_step <= 0.25 * tol {
            // Newton has converged to within tolerance; confirm by a bracketing probe.
            let probe = if fx < 0.0 { next + tol } else { next - tol };
            let (fp, _) = f(probe.clamp(lo, hi))?;
            if (fp > 0.0) == (fx < 0.0) {
                return Ok(next);
            }
        }
        x = next;
    }
    Err(Error::numeric(format!(
        "root finder did not converge within {MAX_ITER} iterations; bracket [{lo}, {hi}]"
    )))
}

/// Bisection for a sign change of an arbitrary continuous function.
/// Returns the final bracket, whose width is at most `tol`.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo == 0.0 {
        return Ok((lo, lo));
    }
    if f_hi == 0.0 {
        return Ok((hi, hi));
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::numeric(format!(
            "no sign change on [{lo}, {hi}]: f = ({f_lo}, {f_hi})"
        )));
    }
    let lo_negative = f_lo < 0.0;
    for _ in 0..MAX_ITER {
        if hi - lo <= tol {
            return Ok((lo, hi));
        }
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok((mid, mid));
        }
        if (fm < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}
