//! Individual-level recalibration on explicit vectors of predicted risks.

use crate::error::{RecalError, Result};
use crate::odds::{apply_or, marginal_or, update_risk, OddsRatio, Probability};
use crate::roots::increasing_positive_root;

const NEWTON_MAX_ITER: usize = 100;
const SCORE_TOLERANCE: f64 = 1e-10;

/// Non-empty vector of predicted risks, each strictly inside (0, 1).
#[derive(Debug, Clone, PartialEq)]
pub struct RiskCohort {
    risks: Vec<f64>,
}

impl RiskCohort {
    pub fn new(risks: Vec<f64>) -> Result<Self> {
        if risks.is_empty() {
            return Err(RecalError::EmptyCohort);
        }
        if let Some((index, &value)) = risks
            .iter()
            .enumerate()
            .find(|(_, &r)| !(r > 0.0 && r < 1.0))
        {
            return Err(RecalError::RiskOutOfRange { index, value });
        }
        Ok(Self { risks })
    }

    pub fn risks(&self) -> &[f64] {
        &self.risks
    }

    pub fn len(&self) -> usize {
        self.risks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.risks.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.risks
    }

    /// Mean risk after applying `x` to every member.
    pub fn mean_updated(&self, x: f64) -> f64 {
        self.risks.iter().map(|&r| update_risk(r, x)).sum::<f64>() / self.risks.len() as f64
    }
}

/// Predicted risks paired with observed binary outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledCohort {
    risks: RiskCohort,
    outcomes: Vec<u8>,
}

impl LabeledCohort {
    pub fn new(risks: Vec<f64>, outcomes: Vec<u8>) -> Result<Self> {
        let risks = RiskCohort::new(risks)?;
        if risks.len() != outcomes.len() {
            return Err(RecalError::LengthMismatch {
                risks: risks.len(),
                outcomes: outcomes.len(),
            });
        }
        if let Some((index, &value)) = outcomes.iter().enumerate().find(|(_, &y)| y > 1) {
            return Err(RecalError::InvalidOutcome { index, value });
        }
        Ok(Self { risks, outcomes })
    }

    pub fn risks(&self) -> &RiskCohort {
        &self.risks
    }

    pub fn outcomes(&self) -> &[u8] {
        &self.outcomes
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn events(&self) -> usize {
        self.outcomes.iter().filter(|&&y| y == 1).count()
    }

    pub fn outcome_mean(&self) -> f64 {
        self.events() as f64 / self.len() as f64
    }

    fn check_not_degenerate(&self) -> Result<()> {
        match self.events() {
            0 => Err(RecalError::DegenerateOutcomes(0)),
            e if e == self.len() => Err(RecalError::DegenerateOutcomes(1)),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSummary {
    pub mean: Probability,
    /// Population variance (divisor `n`).
    pub variance: f64,
    pub n: usize,
}

impl MomentSummary {
    /// Unbiased variance (divisor `n - 1`); `None` for a single observation.
    pub fn sample_variance(&self) -> Option<f64> {
        (self.n > 1).then(|| self.variance * self.n as f64 / (self.n - 1) as f64)
    }
}

pub fn moments(cohort: &RiskCohort) -> MomentSummary {
    let n = cohort.len();
    let mean = cohort.risks.iter().sum::<f64>() / n as f64;
    let mut variance = cohort
        .risks
        .iter()
        .map(|&r| (r - mean) * (r - mean))
        .sum::<f64>()
        / n as f64;
    // rounding can push a near-degenerate spread just past the bound
    variance = variance.min(mean * (1.0 - mean));
    MomentSummary {
        mean: Probability::new(mean.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON))
            .expect("mean of risks in (0,1) lies in (0,1)"),
        variance,
        n,
    }
}

#[inline]
fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Exact conditional odds-ratio: `exp(a)` for the intercept `a` of an
/// intercept-only logistic regression of the outcomes with `logit(risk)` as
/// offset.
///
/// The score `sum(y - sigmoid(a + offset))` is strictly decreasing in `a`,
/// so damped Newton converges to its unique root.
pub fn conditional_or_exact(cohort: &LabeledCohort) -> Result<OddsRatio> {
    cohort.check_not_degenerate()?;
    let n = cohort.len() as f64;
    let offsets: Vec<f64> = cohort
        .risks
        .risks
        .iter()
        .map(|&r| (r / (1.0 - r)).ln())
        .collect();
    let observed = cohort.events() as f64;

    let score_info = |a: f64| {
        let (mut expected, mut info) = (0.0, 0.0);
        for &o in &offsets {
            let p = sigmoid(a + o);
            expected += p;
            info += p * (1.0 - p);
        }
        (observed - expected, info)
    };

    let start = moments(&cohort.risks).mean;
    let mut a = marginal_or(start, Probability::new(observed / n)?).ln();
    let (mut score, mut info) = score_info(a);
    for _ in 0..NEWTON_MAX_ITER {
        if score.abs() < SCORE_TOLERANCE * n {
            // one more full step is nearly free and tightens the root
            let next = a + score / info;
            let (s, i) = score_info(next);
            if s.abs() < score.abs() {
                a = next;
                score = s;
                info = i;
                continue;
            }
            return OddsRatio::new(a.exp());
        }
        let mut step = score / info;
        loop {
            let next = a + step;
            let (s, i) = score_info(next);
            if s.abs() < score.abs() || step.abs() < 1e-300 {
                a = next;
                score = s;
                info = i;
                break;
            }
            step *= 0.5;
        }
    }
    if score.abs() < SCORE_TOLERANCE * n {
        return OddsRatio::new(a.exp());
    }
    Err(RecalError::NoConvergence {
        iterations: NEWTON_MAX_ITER,
        last: a,
    })
}

/// The odds-ratio `x` for which the cohort's mean updated risk equals `p1`.
pub fn population_or(cohort: &RiskCohort, p1: Probability) -> Result<OddsRatio> {
    let target = p1.get();
    let mean = moments(cohort).mean;
    if mean == p1 {
        return Ok(OddsRatio::ONE);
    }
    let guess = marginal_or(mean, p1).get();
    let x = increasing_positive_root(|x| cohort.mean_updated(x) - target, guess, 1e-12)?;
    OddsRatio::new(x)
}

/// Applies `x` to every risk in the cohort.
pub fn apply_update(cohort: &RiskCohort, x: OddsRatio) -> RiskCohort {
    let risks = cohort
        .risks
        .iter()
        .map(|&r| apply_or(Probability(r), x).get())
        .collect();
    RiskCohort { risks }
}
