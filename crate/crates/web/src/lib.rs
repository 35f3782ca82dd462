//! WebAssembly bindings for the browser demo in `www/`.

use recal_core::{
    beta_from_moments, exact_or_beta, expected_updated_mean, marginal_or, taylor_or, variance_grid,
    CalibrationTask, OddsRatio, Probability, ScenarioConfig,
};
use wasm_bindgen::prelude::*;

/// `[simple, taylor, exact]` odds-ratios for a beta population with mean
/// `p0` and variance `v` moved to mean `p1`. Taylor is NaN when the cubic
/// has no admissible root.
#[wasm_bindgen]
pub fn odds_ratios(p0: f64, p1: f64, v: f64) -> Result<Vec<f64>, JsError> {
    compute_odds_ratios(p0, p1, v).map_err(|e| JsError::new(&e))
}

/// Flattened rows of `[variance, auc, relbias_simple, relbias_taylor]`
/// across a variance grid of `points` values.
#[wasm_bindgen]
pub fn bias_curve(p0: f64, delta: f64, points: usize) -> Result<Vec<f64>, JsError> {
    compute_bias_curve(p0, delta, points).map_err(|e| JsError::new(&e))
}

/// Mean risk after applying each of `[simple, taylor, exact]` to the
/// population; the exact entry equals `p1`.
#[wasm_bindgen]
pub fn updated_means(p0: f64, p1: f64, v: f64) -> Result<Vec<f64>, JsError> {
    compute_updated_means(p0, p1, v).map_err(|e| JsError::new(&e))
}

pub fn compute_odds_ratios(p0: f64, p1: f64, v: f64) -> Result<Vec<f64>, String> {
    let task = CalibrationTask::new(p0, p1, v).map_err(|e| e.to_string())?;
    let simple = marginal_or(task.p0(), task.p1()).get();
    let taylor = taylor_or(&task).map_or(f64::NAN, |x| x.get());
    let exact = if v > 0.0 {
        let params = beta_from_moments(task.p0(), v).map_err(|e| e.to_string())?;
        exact_or_beta(params, task.p1())
            .map_err(|e| e.to_string())?
            .get()
    } else {
        simple
    };
    Ok(vec![simple, taylor, exact])
}

pub fn compute_bias_curve(p0: f64, delta: f64, points: usize) -> Result<Vec<f64>, String> {
    let p = Probability::new(p0).map_err(|e| e.to_string())?;
    let config =
        ScenarioConfig::new(p0, delta, variance_grid(p, points)).map_err(|e| e.to_string())?;
    let out = recal_core::run_scenario(&config).map_err(|e| e.to_string())?;
    Ok(out
        .rows
        .iter()
        .flat_map(|r| [r.variance, r.auc, r.relbias_simple, r.relbias_taylor])
        .collect())
}

pub fn compute_updated_means(p0: f64, p1: f64, v: f64) -> Result<Vec<f64>, String> {
    if v <= 0.0 {
        return Err("variance must be positive".into());
    }
    let ors = compute_odds_ratios(p0, p1, v)?;
    let params = beta_from_moments(Probability::new(p0).map_err(|e| e.to_string())?, v)
        .map_err(|e| e.to_string())?;
    Ok(ors
        .into_iter()
        .map(|x| OddsRatio::new(x).map_or(f64::NAN, |x| expected_updated_mean(params, x)))
        .collect())
}
