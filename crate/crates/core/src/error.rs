use thiserror::Error;

/// Message reported when a variance exceeds the bound for a variable on (0, 1).
pub const VARIANCE_BOUND_MESSAGE: &str = "Variance cannot be larger than p0*(1-p0).";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RecalError {
    #[error("{name} must lie strictly inside (0, 1), got {value}")]
    ProbabilityOutOfRange { name: &'static str, value: f64 },

    #[error("odds-ratio must be positive and finite, got {0}")]
    InvalidOddsRatio(f64),

    #[error("Variance cannot be larger than p0*(1-p0).")]
    VarianceTooLarge { variance: f64, bound: f64 },

    #[error("variance must be non-negative and finite, got {0}")]
    NegativeVariance(f64),

    #[error("all cubic coefficients are zero")]
    DegeneratePolynomial,

    #[error("no admissible odds-ratio among roots {roots:?}")]
    NoAdmissibleRoot { roots: Vec<f64> },

    #[error("denominator 1-(1-x)*p0 is not positive for x = {x}, p0 = {p0}")]
    NonPositiveDenominator { x: f64, p0: f64 },

    #[error("no sign change found in [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error("cohort is empty")]
    EmptyCohort,

    #[error("risk at index {index} must lie strictly inside (0, 1), got {value}")]
    RiskOutOfRange { index: usize, value: f64 },

    #[error("outcome at index {index} must be 0 or 1, got {value}")]
    InvalidOutcome { index: usize, value: u8 },

    #[error("risks and outcomes differ in length ({risks} vs {outcomes})")]
    LengthMismatch { risks: usize, outcomes: usize },

    #[error("outcomes are all {0}; the intercept estimate diverges")]
    DegenerateOutcomes(u8),

    #[error(
        "Newton iteration did not converge after {iterations} iterations (last intercept {last})"
    )]
    NoConvergence { iterations: usize, last: f64 },

    #[error("beta shape parameters must be positive and finite, got ({alpha}, {beta})")]
    InvalidBetaParams { alpha: f64, beta: f64 },

    #[error("variance {variance} is not attainable by a beta distribution with mean {mean}")]
    UnattainableVariance { mean: f64, variance: f64 },

    #[error("sample size must be at least 1")]
    EmptySample,

    #[error("target mean {p1} = p0 * (1 + delta) is outside (0, 1)")]
    TargetOutOfRange { p1: f64 },
}

pub type Result<T, E = RecalError> = std::result::Result<T, E>;
