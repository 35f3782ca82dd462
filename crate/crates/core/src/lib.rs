//! Recalibrating binary risk prediction models by a fixed odds-ratio.
//!
//! Three ways to pick the odds-ratio are provided:
//!
//! * [`marginal_or`]: ratio of target odds to current odds. It ignores the
//!   spread of individual risks and so under-corrects.
//! * [`taylor_or`]: closed-form correction from the mean and variance of the
//!   predicted risks, via the real roots of a cubic.
//! * [`conditional_or_exact`] / [`population_or`]: exact fit on individual
//!   predicted risks (with or without observed outcomes).
//!
//! [`beta`] models populations of predicted risks as beta distributions and
//! [`simulation`] sweeps variance grids to compare the three.
//!
//! ```
//! use recal_core::{marginal_or, taylor_or, CalibrationTask, Probability};
//!
//! let task = CalibrationTask::new(0.577, 0.361, 0.025)?;
//! let simple = marginal_or(task.p0(), task.p1());
//! let taylor = taylor_or(&task)?;
//! assert!(taylor.get() < simple.get());
//!
//! let updated = recal_core::apply_or(Probability::new(0.4)?, taylor);
//! assert!(updated.get() < 0.4);
//! # Ok::<(), recal_core::RecalError>(())
//! ```

pub mod auc;
pub mod beta;
pub mod cohort;
pub mod cubic;
pub mod error;
pub mod odds;
pub mod quadrature;
pub mod roots;
pub mod simulation;
pub mod taylor;

pub use auc::auc_empirical;
pub use beta::{
    auc_beta, beta_from_moments, exact_or_beta, expected_updated_mean, sample_beta,
    sample_beta_stream, BetaParams, BetaRule,
};
pub use cohort::{
    apply_update, conditional_or_exact, moments, population_or, LabeledCohort, MomentSummary,
    RiskCohort,
};
pub use cubic::{solve_cubic_real, CubicPoly};
pub use error::{RecalError, Result, VARIANCE_BOUND_MESSAGE};
pub use odds::{apply_or, marginal_or, taylor_lhs, CalibrationTask, OddsRatio, Probability};
pub use simulation::{
    figure1_grid, run_scenario, variance_grid, FigureSpec, Panel, ScenarioConfig, ScenarioOutput,
    ScenarioRow, ScenarioWarning,
};
pub use taylor::{
    cubic_coefficients, select_root, taylor_or, taylor_or_detailed, taylor_or_numeric, RootChoice,
};
