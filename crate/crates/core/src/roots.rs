//! Bracketing root search for scalar functions.

use crate::error::{RecalError, Result};

const MAX_BISECTIONS: usize = 400;

/// Bisection on `[lo, hi]` where `f(lo)` and `f(hi)` differ in sign.
///
/// Stops when the bracket is narrower than `tol` or when the midpoint can no
/// longer be separated from an endpoint in floating point.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if !(flo.signum() != fhi.signum()) || flo.is_nan() || fhi.is_nan() {
        return Err(RecalError::NoBracket { lo, hi });
    }
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Root of an increasing function of `x > 0`, searched on the log scale.
///
/// The bracket starts at `[guess / 10, guess * 10]` and widens by decades
/// until it straddles zero or leaves `[1e-300, 1e300]`. The final
/// refinement runs on the raw scale to absolute tolerance `tol`.
pub fn increasing_positive_root<F>(mut f: F, guess: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let guess = if guess > 0.0 && guess.is_finite() {
        guess
    } else {
        1.0
    };
    let mut lo = guess / 10.0;
    let mut hi = guess * 10.0;
    while f(lo) > 0.0 {
        lo /= 10.0;
        if lo < 1e-300 {
            return Err(RecalError::NoBracket { lo, hi });
        }
    }
    while f(hi) < 0.0 {
        hi *= 10.0;
        if hi > 1e300 {
            return Err(RecalError::NoBracket { lo, hi });
        }
    }
    // narrow on the log scale first so the raw-scale stage starts tight
    let (mut llo, mut lhi) = (lo.ln(), hi.ln());
    for _ in 0..60 {
        let mid = 0.5 * (llo + lhi);
        if f(mid.exp()) < 0.0 {
            llo = mid;
        } else {
            lhi = mid;
        }
    }
    let lo = llo.exp() * (1.0 - 1e-12);
    let hi = lhi.exp() * (1.0 + 1e-12);
    bisect(f, lo, hi, tol).or_else(|_| Ok(0.5 * (llo.exp() + lhi.exp())))
}
