//! Odds-scale primitives: the risk update under a fixed odds-ratio, the
//! marginal adjustment and the second-order approximation of the mean
//! updated risk.

use std::fmt;

use crate::error::{RecalError, Result};

/// A probability strictly inside (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Probability(pub(crate) f64);

impl Probability {
    pub fn new(value: f64) -> Result<Self> {
        Self::named("probability", value)
    }

    pub(crate) fn named(name: &'static str, value: f64) -> Result<Self> {
        if value > 0.0 && value < 1.0 {
            Ok(Self(value))
        } else {
            Err(RecalError::ProbabilityOutOfRange { name, value })
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn odds(self) -> f64 {
        self.0 / (1.0 - self.0)
    }

    #[inline]
    pub fn logit(self) -> f64 {
        (self.0 / (1.0 - self.0)).ln()
    }
}

impl TryFrom<f64> for Probability {
    type Error = RecalError;

    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A positive, finite multiplier on the odds scale.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct OddsRatio(pub(crate) f64);

impl OddsRatio {
    pub const ONE: OddsRatio = OddsRatio(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if value > 0.0 && value.is_finite() {
            Ok(Self(value))
        } else {
            Err(RecalError::InvalidOddsRatio(value))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn ln(self) -> f64 {
        self.0.ln()
    }

    pub fn inverse(self) -> Self {
        Self(1.0 / self.0)
    }
}

impl TryFrom<f64> for OddsRatio {
    type Error = RecalError;

    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

impl fmt::Display for OddsRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Summary statistics needed to recalibrate without individual data:
/// the current mean predicted risk `p0`, the desired mean `p1` and the
/// variance `v` of the predicted risks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationTask {
    p0: Probability,
    p1: Probability,
    v: f64,
}

impl CalibrationTask {
    pub fn new(p0: f64, p1: f64, v: f64) -> Result<Self> {
        let p0 = Probability::named("p0", p0)?;
        let p1 = Probability::named("p1", p1)?;
        if !(v >= 0.0) || !v.is_finite() {
            return Err(RecalError::NegativeVariance(v));
        }
        let bound = p0.get() * (1.0 - p0.get());
        if v > bound {
            return Err(RecalError::VarianceTooLarge { variance: v, bound });
        }
        Ok(Self { p0, p1, v })
    }

    pub fn p0(&self) -> Probability {
        self.p0
    }

    pub fn p1(&self) -> Probability {
        self.p1
    }

    pub fn variance(&self) -> f64 {
        self.v
    }
}

/// Applies odds-ratio `x` to risk `pi`: `pi*x / (1 - pi + pi*x)`.
#[inline]
pub fn apply_or(pi: Probability, x: OddsRatio) -> Probability {
    Probability(update_risk(pi.get(), x.get()))
}

/// Unchecked scalar form of [`apply_or`], used in inner loops where the
/// inputs were already validated.
#[inline]
pub(crate) fn update_risk(pi: f64, x: f64) -> f64 {
    let num = pi * x;
    num / (1.0 - pi + num)
}

/// Ratio of target odds to current odds.
pub fn marginal_or(p0: Probability, p1: Probability) -> OddsRatio {
    if p0 == p1 {
        return OddsRatio::ONE;
    }
    OddsRatio(p1.odds() / p0.odds())
}

/// Second-order Taylor approximation of the mean updated risk `E f(pi, x)`
/// around `pi = p0`.
pub fn taylor_lhs(task: &CalibrationTask, x: OddsRatio) -> Result<f64> {
    taylor_lhs_raw(task.p0.get(), task.v, x.get())
}

pub(crate) fn taylor_lhs_raw(p0: f64, v: f64, x: f64) -> Result<f64> {
    let den = 1.0 - (1.0 - x) * p0;
    if !(den > 0.0) {
        return Err(RecalError::NonPositiveDenominator { x, p0 });
    }
    Ok(x * p0 / den + (1.0 - x) * x * v / (den * den * den))
}
