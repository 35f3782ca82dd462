//! Recovering the conditional odds-ratio from the mean and variance of the
//! predicted risks.
//!
//! Expanding `E f(pi, x)` to second order around `p0` and clearing the
//! denominator turns `E f(pi, x) = p1` into a cubic in `x`. At most three
//! real roots come out; the admissible one is positive and lies on the same
//! side of 1 as `p1 / p0`.

use crate::cubic::{solve_cubic_real, CubicPoly};
use crate::error::{RecalError, Result};
use crate::odds::{marginal_or, taylor_lhs_raw, CalibrationTask, OddsRatio, Probability};
use crate::roots::bisect;

/// Coefficients of the cubic whose roots solve `taylor_lhs(task, x) = p1`.
pub fn cubic_coefficients(task: &CalibrationTask) -> CubicPoly {
    let p0 = task.p0().get();
    let p1 = task.p1().get();
    let v = task.variance();
    let p0_2 = p0 * p0;
    let p0_3 = p0_2 * p0;
    CubicPoly {
        a: p0_3 - p1 * p0_3,
        b: 3.0 * p1 * p0_3 - 2.0 * p0_3 - 3.0 * p1 * p0_2 + 2.0 * p0_2 - v,
        c: p0_3 - 3.0 * p1 * p0_3 + 6.0 * p1 * p0_2 - 2.0 * p0_2 + p0 - 3.0 * p1 * p0 + v,
        d: p1 * p0_3 - 3.0 * p1 * p0_2 + 3.0 * p1 * p0 - p1,
    }
}

/// Outcome of filtering candidate roots.
#[derive(Debug, Clone, PartialEq)]
pub struct RootChoice {
    pub odds_ratio: OddsRatio,
    /// Every root that survived filtering. More than one means the choice
    /// fell back to the closest-to-marginal rule and deserves a warning.
    pub survivors: Vec<f64>,
}

impl RootChoice {
    pub fn is_ambiguous(&self) -> bool {
        self.survivors.len() > 1
    }
}

/// Picks the admissible odds-ratio among `roots`.
///
/// Roots that are not positive or that sit on the wrong side of 1 are
/// dropped. If several survive, the one nearest the marginal odds-ratio on
/// the log scale wins.
pub fn select_root(roots: &[f64], p0: Probability, p1: Probability) -> Result<RootChoice> {
    if p0 == p1 {
        return Ok(RootChoice {
            odds_ratio: OddsRatio::ONE,
            survivors: vec![1.0],
        });
    }
    let direction = (p1.get() / p0.get()).ln().signum();
    let survivors: Vec<f64> = roots
        .iter()
        .copied()
        .filter(|&r| r > 0.0 && r.is_finite() && r.ln().signum() == direction && r != 1.0)
        .collect();
    let anchor = marginal_or(p0, p1).ln();
    let best = survivors
        .iter()
        .copied()
        .min_by(|a, b| (a.ln() - anchor).abs().total_cmp(&(b.ln() - anchor).abs()))
        .ok_or_else(|| RecalError::NoAdmissibleRoot {
            roots: roots.to_vec(),
        })?;
    Ok(RootChoice {
        odds_ratio: OddsRatio::new(best)?,
        survivors,
    })
}

/// Taylor-corrected odds-ratio with the candidate list kept for diagnostics.
pub fn taylor_or_detailed(task: &CalibrationTask) -> Result<RootChoice> {
    let roots = solve_cubic_real(&cubic_coefficients(task))?;
    select_root(&roots, task.p0(), task.p1())
}

/// Odds-ratio that moves the mean predicted risk from `p0` to `p1` once the
/// spread `v` of the risks is accounted for.
pub fn taylor_or(task: &CalibrationTask) -> Result<OddsRatio> {
    taylor_or_detailed(task).map(|c| c.odds_ratio)
}

/// Same quantity as [`taylor_or`], found by bisection on the Taylor equation
/// itself instead of the closed-form cubic.
///
/// The search interval runs from `min(1, m) / 1000` to `max(1, m) * 1000`
/// (with `m` the marginal odds-ratio) on the side of 1 indicated by
/// `p1 / p0`. The equation has at most three roots; stationary points of
/// the cleared cubic split the interval into monotone pieces, each piece
/// with a sign change is bisected, and the nearest root to `m` on the log
/// scale is returned.
pub fn taylor_or_numeric(task: &CalibrationTask) -> Result<OddsRatio> {
    let (p0, p1, v) = (task.p0().get(), task.p1().get(), task.variance());
    if task.p0() == task.p1() {
        return Ok(OddsRatio::ONE);
    }
    let m = marginal_or(task.p0(), task.p1()).get();
    let (lo, hi) = if p1 < p0 {
        (m.min(1.0) / 1e3, 1.0)
    } else {
        (1.0, m.max(1.0) * 1e3)
    };
    let g = |x: f64| taylor_lhs_raw(p0, v, x).map(|y| y - p1).unwrap_or(f64::NAN);

    let mut cuts = vec![lo];
    cuts.extend(
        stationary_points(&cubic_coefficients(task))
            .into_iter()
            .filter(|&s| s > lo && s < hi),
    );
    cuts.push(hi);
    cuts.sort_by(f64::total_cmp);

    let mut found = Vec::new();
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (ga, gb) = (g(a), g(b));
        if ga.is_nan() || gb.is_nan() {
            continue;
        }
        if ga == 0.0 || gb == 0.0 || ga.signum() != gb.signum() {
            found.push(bisect(g, a, b, 0.0)?);
        }
    }
    found.retain(|&r| r != 1.0);
    let anchor = m.ln();
    found
        .into_iter()
        .min_by(|a, b| (a.ln() - anchor).abs().total_cmp(&(b.ln() - anchor).abs()))
        .ok_or(RecalError::NoBracket { lo, hi })
        .and_then(OddsRatio::new)
}

/// Real zeros of the cubic's derivative.
fn stationary_points(poly: &CubicPoly) -> Vec<f64> {
    let (a, b, c) = (3.0 * poly.a, 2.0 * poly.b, poly.c);
    if a == 0.0 {
        return if b == 0.0 { Vec::new() } else { vec![-c / b] };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    if q == 0.0 {
        return vec![0.0];
    }
    vec![q / a, c / q]
}
