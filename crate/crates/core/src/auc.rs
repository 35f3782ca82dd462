//! Empirical AUC (Mann-Whitney statistic).

use crate::cohort::LabeledCohort;
use crate::error::{RecalError, Result};

/// `(concordant + tied / 2) / (events * non_events)` over all event,
/// non-event pairs, computed by one sort.
pub fn auc_empirical(cohort: &LabeledCohort) -> Result<f64> {
    let risks = cohort.risks().risks();
    let outcomes = cohort.outcomes();
    let events = cohort.events() as u64;
    let non_events = cohort.len() as u64 - events;
    if events == 0 {
        return Err(RecalError::DegenerateOutcomes(0));
    }
    if non_events == 0 {
        return Err(RecalError::DegenerateOutcomes(1));
    }

    let mut order: Vec<usize> = (0..risks.len()).collect();
    order.sort_by(|&i, &j| risks[i].total_cmp(&risks[j]));

    // twice the Mann-Whitney U, kept integral so ties stay exact
    let mut twice_u: u64 = 0;
    let mut neg_below: u64 = 0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        let (mut pos, mut neg) = (0u64, 0u64);
        while j < order.len() && risks[order[j]] == risks[order[i]] {
            if outcomes[order[j]] == 1 {
                pos += 1;
            } else {
                neg += 1;
            }
            j += 1;
        }
        twice_u += 2 * pos * neg_below + pos * neg;
        neg_below += neg;
        i = j;
    }
    Ok(twice_u as f64 / (2 * events * non_events) as f64)
}
