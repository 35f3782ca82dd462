//! Beta-distributed populations of predicted risks.
//!
//! Expectations are computed with a fixed Gauss-Legendre rule split at the
//! distribution mean, with an extra window of plain panels around the mean
//! when the distribution is narrow. The two outer panels carry a power
//! substitution (`pi = c * s^m` on the left, `1 - pi = (1 - c) * s^m` on the
//! right)
//! that absorbs the `pi^(alpha-1)` or `(1-pi)^(beta-1)` factor, so shapes
//! below 1 with integrable endpoint singularities are handled by the same
//! deterministic rule as smooth ones. Weights are kept in log space until
//! normalization, which keeps very concentrated distributions from
//! underflowing.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cohort::RiskCohort;
use crate::error::{RecalError, Result};
use crate::odds::{marginal_or, OddsRatio, Probability};
use crate::quadrature::GaussLegendre;
use crate::roots::increasing_positive_root;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaParams {
    alpha: f64,
    beta: f64,
}

impl BetaParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite() {
            Ok(Self { alpha, beta })
        } else {
            Err(RecalError::InvalidBetaParams { alpha, beta })
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn mean(&self) -> f64 {
        self.alpha / (self.alpha + self.beta)
    }

    pub fn variance(&self) -> f64 {
        let s = self.alpha + self.beta;
        self.alpha * self.beta / (s * s * (s + 1.0))
    }
}

/// Method-of-moments fit: the beta distribution with the given mean and
/// variance.
pub fn beta_from_moments(mean: Probability, variance: f64) -> Result<BetaParams> {
    let m = mean.get();
    let c = m * (1.0 - m) / variance - 1.0;
    if !(variance > 0.0) || !(c > 0.0) || !c.is_finite() {
        return Err(RecalError::UnattainableVariance { mean: m, variance });
    }
    BetaParams::new(m * c, (1.0 - m) * c)
}

/// `n` exact draws, reproducible from `seed`.
pub fn sample_beta(params: BetaParams, n: usize, seed: u64) -> Result<RiskCohort> {
    sample_beta_stream(params, n, seed, 0)
}

/// Draws from stream `stream` of the ChaCha8 generator keyed by `seed`.
///
/// Streams of one seed are non-overlapping, so callers running many
/// scenarios from one seed give scenario `k` stream `k`.
pub fn sample_beta_stream(
    params: BetaParams,
    n: usize,
    seed: u64,
    stream: u64,
) -> Result<RiskCohort> {
    if n == 0 {
        return Err(RecalError::EmptySample);
    }
    let dist = rand_distr::Beta::new(params.alpha, params.beta).map_err(|_| {
        RecalError::InvalidBetaParams {
            alpha: params.alpha,
            beta: params.beta,
        }
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut risks = Vec::with_capacity(n);
    while risks.len() < n {
        // tiny shapes can round a draw onto an endpoint; those are redrawn
        let r: f64 = rng.sample(dist);
        if r > 0.0 && r < 1.0 {
            risks.push(r);
        }
    }
    RiskCohort::new(risks)
}

/// Half-width of the central window, in standard deviations, used when the
/// distribution is narrow compared with its distance to 0 or 1.
const WINDOW_SDS: f64 = 40.0;

/// A quadrature node kept as `ln pi` and `ln(1 - pi)`; near either end one
/// of the two is not representable through `pi` itself.
#[derive(Debug, Clone, Copy)]
struct Node {
    ln_p: f64,
    ln_q: f64,
}

impl Node {
    fn risk(self) -> f64 {
        self.ln_p.exp()
    }

    /// `pi x / (1 - pi + pi x)` written as a logistic of log-odds.
    fn updated(self, ln_x: f64) -> f64 {
        let z = self.ln_p - self.ln_q + ln_x;
        if z >= 0.0 {
            1.0 / (1.0 + (-z).exp())
        } else {
            let e = z.exp();
            e / (1.0 + e)
        }
    }
}

/// Quadrature rule for expectations under one beta distribution.
#[derive(Debug, Clone)]
pub struct BetaRule {
    params: BetaParams,
    split: f64,
    window: (Option<f64>, Option<f64>),
    nodes: Vec<Node>,
    weights: Vec<f64>,
    log_norm: f64,
}

impl BetaRule {
    pub fn new(params: BetaParams) -> Self {
        let split = params.mean();
        let sd = params.variance().sqrt();
        let lo = Some(split - WINDOW_SDS * sd).filter(|&l| l > 0.0);
        let hi = Some(split + WINDOW_SDS * sd).filter(|&h| h < 1.0);

        let mut raw: Vec<(Node, f64)> = Vec::new();
        match lo {
            Some(l) => {
                raw.extend(left_panel(params, l));
                raw.extend(plain_panel(params, l, split));
            }
            None => raw.extend(left_panel(params, split)),
        }
        match hi {
            Some(h) => {
                raw.extend(plain_panel(params, split, h));
                raw.extend(right_panel(params, h));
            }
            None => raw.extend(right_panel(params, split)),
        }

        let lmax = raw
            .iter()
            .map(|&(_, lw)| lw)
            .fold(f64::NEG_INFINITY, f64::max);
        let mut weights: Vec<f64> = raw.iter().map(|&(_, lw)| (lw - lmax).exp()).collect();
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        Self {
            params,
            split,
            window: (lo, hi),
            nodes: raw.into_iter().map(|(n, _)| n).collect(),
            weights,
            log_norm: lmax + total.ln(),
        }
    }

    pub fn params(&self) -> BetaParams {
        self.params
    }

    pub fn expect<F: FnMut(f64) -> f64>(&self, mut g: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&n, &w)| w * g(n.risk()))
            .sum()
    }

    /// `E f(pi, x)` accurate even where `pi` rounds to 0 or 1.
    pub fn expect_updated(&self, x: f64) -> f64 {
        let ln_x = x.ln();
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&n, &w)| w * n.updated(ln_x))
            .sum()
    }

    /// `P(pi <= t)`.
    pub fn cdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if t >= 1.0 {
            return 1.0;
        }
        let mass = |it: &mut dyn Iterator<Item = (Node, f64)>| -> f64 {
            it.map(|(_, lw)| (lw - self.log_norm).exp()).sum()
        };
        let p = self.params;
        if t <= self.split {
            let below = match self.window.0 {
                Some(l) if t > l => mass(&mut left_panel(p, l)) + mass(&mut plain_panel(p, l, t)),
                _ => mass(&mut left_panel(p, t)),
            };
            below.min(1.0)
        } else {
            let above = match self.window.1 {
                Some(h) if t < h => mass(&mut right_panel(p, h)) + mass(&mut plain_panel(p, t, h)),
                _ => mass(&mut right_panel(p, t)),
            };
            (1.0 - above).max(0.0)
        }
    }
}

/// Nodes on `(0, hi]` with log weights for the unnormalized density.
fn left_panel(params: BetaParams, hi: f64) -> impl Iterator<Item = (Node, f64)> {
    let (a, b) = (params.alpha, params.beta);
    let power = a.ceil() / a;
    let s_exp = a.ceil() - 1.0;
    let ln_hi = hi.ln();
    let base = a * ln_hi + power.ln();
    let rule = GaussLegendre::standard();
    rule.nodes.iter().zip(&rule.weights).map(move |(&t, &w)| {
        let s = 0.5 * (t + 1.0);
        let ln_p = ln_hi + power * s.ln();
        let ln_q = (-ln_p.exp()).ln_1p();
        let lw = base + s_exp * s.ln() + (b - 1.0) * ln_q + (0.5 * w).ln();
        (Node { ln_p, ln_q }, lw)
    })
}

/// Nodes on `[lo, 1)` with log weights for the unnormalized density.
fn right_panel(params: BetaParams, lo: f64) -> impl Iterator<Item = (Node, f64)> {
    let (a, b) = (params.alpha, params.beta);
    let power = b.ceil() / b;
    let s_exp = b.ceil() - 1.0;
    let ln_width = (-lo).ln_1p();
    let base = b * ln_width + power.ln();
    let rule = GaussLegendre::standard();
    rule.nodes.iter().zip(&rule.weights).map(move |(&t, &w)| {
        let s = 0.5 * (t + 1.0);
        let ln_q = ln_width + power * s.ln();
        let ln_p = (-ln_q.exp()).ln_1p();
        let lw = base + s_exp * s.ln() + (a - 1.0) * ln_p + (0.5 * w).ln();
        (Node { ln_p, ln_q }, lw)
    })
}

/// Plain Gauss-Legendre nodes on `[lo, hi]` inside (0, 1).
fn plain_panel(params: BetaParams, lo: f64, hi: f64) -> impl Iterator<Item = (Node, f64)> {
    let (a, b) = (params.alpha, params.beta);
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    let rule = GaussLegendre::standard();
    rule.nodes.iter().zip(&rule.weights).map(move |(&t, &w)| {
        let x = mid + half * t;
        let ln_p = x.ln();
        let ln_q = (-x).ln_1p();
        let lw = (a - 1.0) * ln_p + (b - 1.0) * ln_q + (half * w).ln();
        (Node { ln_p, ln_q }, lw)
    })
}

/// `E f(pi, x)` for `pi ~ beta(alpha, beta)`, without Taylor truncation.
pub fn expected_updated_mean(params: BetaParams, x: OddsRatio) -> f64 {
    BetaRule::new(params).expect_updated(x.get())
}

/// The odds-ratio that moves the mean of a beta population to `p1`.
pub fn exact_or_beta(params: BetaParams, p1: Probability) -> Result<OddsRatio> {
    let rule = BetaRule::new(params);
    exact_or_with_rule(&rule, p1)
}

pub(crate) fn exact_or_with_rule(rule: &BetaRule, p1: Probability) -> Result<OddsRatio> {
    let mean = rule.params.mean();
    if mean == p1.get() {
        return Ok(OddsRatio::ONE);
    }
    let guess = match Probability::new(mean) {
        Ok(m) => marginal_or(m, p1).get(),
        Err(_) => 1.0,
    };
    let target = p1.get();
    let x = increasing_positive_root(|x| rule.expect_updated(x) - target, guess, 1e-12)?;
    OddsRatio::new(x)
}

/// Population AUC when outcomes are Bernoulli draws from beta-distributed
/// risks.
///
/// Risks of events follow `beta(alpha + 1, beta)` and risks of non-events
/// `beta(alpha, beta + 1)`, so the AUC is `P(X > Y)` for those two
/// independent variables: the outer rule runs over `X` and the inner
/// non-event CDF is itself a quadrature at each outer node.
pub fn auc_beta(params: BetaParams) -> f64 {
    let (a, b) = (params.alpha, params.beta);
    let events = BetaRule::new(BetaParams {
        alpha: a + 1.0,
        beta: b,
    });
    let non_events = BetaRule::new(BetaParams {
        alpha: a,
        beta: b + 1.0,
    });
    events.expect(|t| non_events.cdf(t))
}
