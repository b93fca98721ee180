//! Finite-difference derivatives used by the sign checks.

use crate::error::Result;

pub const STEP: f64 = 1e-5;
pub const FALLBACK_STEP: f64 = 1e-6;
const AGREEMENT: f64 = 1e-3;

pub fn central<F>(mut f: F, x: f64, step: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    Ok((f(x + step)? - f(x - step)?) / (2.0 * step))
}

/// `(f(x + step) - f(x)) / step`.
pub fn forward<F>(mut f: F, x: f64, step: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    Ok((f(x + step)? - f(x)?) / step)
}

/// Central difference at [`STEP`]; if it disagrees with the [`FALLBACK_STEP`]
/// estimate by more than a relative 1e-3, Richardson-extrapolate from the smaller step.
pub fn derivative<F>(mut f: F, x: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let coarse = central(&mut f, x, STEP)?;
    let fine = central(&mut f, x, FALLBACK_STEP)?;
    let scale = coarse.abs().max(fine.abs());
    if (coarse - fine).abs() <= AGREEMENT * scale {
        return Ok(coarse);
    }
    let half = central(&mut f, x, 0.5 * FALLBACK_STEP)?;
    Ok((4.0 * half - fine) / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_function() {
        let d = derivative(|x| Ok(x.sin()), 0.7).unwrap();
        assert!((d - 0.7f64.cos()).abs() < 1e-9);
        let f = forward(|x| Ok(x * x), 1.0, 1e-6).unwrap();
        assert!((f - 2.0).abs() < 1e-5);
    }

    #[test]
    fn kink_uses_fallback() {
        // |x - 0.3e-5| has a kink inside the coarse stencil only
        let d = derivative(|x: f64| Ok((x - 3e-6).abs()), 0.0).unwrap();
        assert!((d + 1.0).abs() < 1e-9);
    }
}
