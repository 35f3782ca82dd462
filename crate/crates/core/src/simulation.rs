//! Variance sweeps comparing the marginal and Taylor odds-ratios against
//! the exact conditional odds-ratio of a beta population.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::beta::{auc_beta, beta_from_moments, exact_or_with_rule, sample_beta_stream, BetaRule};
use crate::cohort::population_or;
use crate::error::{RecalError, Result};
use crate::odds::{marginal_or, CalibrationTask, Probability};
use crate::taylor::taylor_or_detailed;

/// Lower end of the default variance grid as a fraction of `p0 (1 - p0)`.
pub const GRID_LOW_FRACTION: f64 = 0.001;
/// Upper end of the default variance grid; the bound itself is not
/// attainable by a beta distribution.
pub const GRID_HIGH_FRACTION: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Panel {
    /// Target prevalence below the original.
    Lower,
    /// Target prevalence above the original.
    Higher,
}

impl Panel {
    pub fn of(delta: f64) -> Self {
        if delta < 0.0 {
            Panel::Lower
        } else {
            Panel::Higher
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Panel::Lower => "A",
            Panel::Higher => "B",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub p0: Probability,
    /// Relative change in mean risk; `p1 = p0 * (1 + delta)`.
    pub delta: f64,
    pub variance_grid: Vec<f64>,
    /// Sample size of the Monte Carlo cross-check; 0 disables it.
    pub mc_n: usize,
    pub seed: u64,
    /// Grid point `i` draws from stream `stream_base + i` of `seed`.
    pub stream_base: u64,
}

impl ScenarioConfig {
    pub fn new(p0: f64, delta: f64, variance_grid: Vec<f64>) -> Result<Self> {
        Ok(Self {
            p0: Probability::named("p0", p0)?,
            delta,
            variance_grid,
            mc_n: 0,
            seed: 0,
            stream_base: 0,
        })
    }

    pub fn with_mc_check(mut self, mc_n: usize, seed: u64) -> Self {
        self.mc_n = mc_n;
        self.seed = seed;
        self
    }

    pub fn p1(&self) -> Result<Probability> {
        let p1 = self.p0.get() * (1.0 + self.delta);
        Probability::named("p1", p1).map_err(|_| RecalError::TargetOutOfRange { p1 })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioRow {
    pub panel: Panel,
    pub p0: f64,
    pub delta: f64,
    pub p1: f64,
    pub variance: f64,
    pub auc: f64,
    pub or_exact: f64,
    pub or_simple: f64,
    pub or_taylor: f64,
    pub relbias_simple: f64,
    pub relbias_taylor: f64,
    /// More than one admissible Taylor root; the closest to the marginal
    /// odds-ratio was kept.
    pub taylor_ambiguous: bool,
    /// Odds-ratio fitted on a seeded beta sample, when requested.
    pub or_exact_mc: Option<f64>,
}

impl ScenarioRow {
    /// `ln(or_simple) - ln(or_exact)`.
    pub fn logbias_simple(&self) -> f64 {
        self.or_simple.ln() - self.or_exact.ln()
    }

    /// `ln(or_taylor) - ln(or_exact)`.
    pub fn logbias_taylor(&self) -> f64 {
        self.or_taylor.ln() - self.or_exact.ln()
    }
}

/// A grid point that produced no row.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioWarning {
    pub p0: f64,
    pub delta: f64,
    pub variance: f64,
    pub reason: RecalError,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScenarioOutput {
    pub rows: Vec<ScenarioRow>,
    pub warnings: Vec<ScenarioWarning>,
}

impl ScenarioOutput {
    fn extend(&mut self, other: ScenarioOutput) {
        self.rows.extend(other.rows);
        self.warnings.extend(other.warnings);
    }
}

/// `points` variances evenly spaced over `[0.001, 0.95] * p0 (1 - p0)`.
pub fn variance_grid(p0: Probability, points: usize) -> Vec<f64> {
    let bound = p0.get() * (1.0 - p0.get());
    let (lo, hi) = (GRID_LOW_FRACTION * bound, GRID_HIGH_FRACTION * bound);
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..points)
            .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
            .collect(),
    }
}

fn evaluate_point(
    config: &ScenarioConfig,
    p1: Probability,
    index: usize,
    v: f64,
) -> Result<ScenarioRow> {
    let p0 = config.p0;
    let params = beta_from_moments(p0, v)?;
    let rule = BetaRule::new(params);
    let or_exact = exact_or_with_rule(&rule, p1)?.get();
    let or_simple = marginal_or(p0, p1).get();
    let taylor = taylor_or_detailed(&CalibrationTask::new(p0.get(), p1.get(), v)?)?;
    let or_taylor = taylor.odds_ratio.get();
    let or_exact_mc = if config.mc_n > 0 {
        let stream = config.stream_base.wrapping_add(index as u64);
        let sample = sample_beta_stream(params, config.mc_n, config.seed, stream)?;
        Some(population_or(&sample, p1)?.get())
    } else {
        None
    };
    Ok(ScenarioRow {
        panel: Panel::of(config.delta),
        p0: p0.get(),
        delta: config.delta,
        p1: p1.get(),
        variance: v,
        auc: auc_beta(params),
        or_exact,
        or_simple,
        or_taylor,
        relbias_simple: or_simple / or_exact - 1.0,
        relbias_taylor: or_taylor / or_exact - 1.0,
        taylor_ambiguous: taylor.is_ambiguous(),
        or_exact_mc,
    })
}

/// Evaluates every grid variance of one `(p0, delta)` scenario.
///
/// Rows come back ordered by variance. Points where the beta fit or the
/// Taylor solve fails are reported as warnings instead of rows.
pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioOutput> {
    let p1 = config.p1()?;
    let mut grid: Vec<(usize, f64)> = config.variance_grid.iter().copied().enumerate().collect();
    grid.sort_by(|a, b| a.1.total_cmp(&b.1));

    let eval = |&(i, v): &(usize, f64)| (v, evaluate_point(config, p1, i, v));
    #[cfg(feature = "parallel")]
    let results: Vec<_> = grid.par_iter().map(eval).collect();
    #[cfg(not(feature = "parallel"))]
    let results: Vec<_> = grid.iter().map(eval).collect();

    let mut out = ScenarioOutput::default();
    for (variance, r) in results {
        match r {
            Ok(row) => out.rows.push(row),
            Err(reason) => out.warnings.push(ScenarioWarning {
                p0: config.p0.get(),
                delta: config.delta,
                variance,
                reason,
            }),
        }
    }
    Ok(out)
}

/// The panel layout of the bias-comparison sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureSpec {
    pub p0s: Vec<f64>,
    pub deltas: Vec<f64>,
    pub grid_points: usize,
    pub mc_n: usize,
    pub seed: u64,
}

impl Default for FigureSpec {
    fn default() -> Self {
        Self {
            p0s: vec![0.1, 0.25, 0.5],
            deltas: vec![-0.5, -0.25, -0.1, 0.1, 0.25, 0.5],
            grid_points: 20,
            mc_n: 0,
            seed: 0,
        }
    }
}

impl FigureSpec {
    /// Scenario configs in `(p0, delta)` order; pairs whose target leaves
    /// (0, 1) are dropped.
    pub fn scenarios(&self) -> Result<Vec<ScenarioConfig>> {
        let mut out = Vec::new();
        for (i, &p0) in self.p0s.iter().enumerate() {
            let p = Probability::named("p0", p0)?;
            for (j, &delta) in self.deltas.iter().enumerate() {
                let mut config =
                    ScenarioConfig::new(p0, delta, variance_grid(p, self.grid_points))?
                        .with_mc_check(self.mc_n, self.seed);
                if config.p1().is_err() {
                    continue;
                }
                config.stream_base = ((i * self.deltas.len() + j) as u64) << 32;
                out.push(config);
            }
        }
        Ok(out)
    }

    pub fn run(&self) -> Result<ScenarioOutput> {
        let mut out = ScenarioOutput::default();
        for config in self.scenarios()? {
            out.extend(run_scenario(&config)?);
        }
        Ok(out)
    }
}

/// The default sweep: `p0` in {0.1, 0.25, 0.5}, `delta` in
/// {-50%, -25%, -10%, +10%, +25%, +50%}, 20 variances per panel.
pub fn figure1_grid() -> Result<ScenarioOutput> {
    FigureSpec::default().run()
}
