//! Independent oracles for the closed-form and quadrature routes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use recal_core::*;

fn p(v: f64) -> Probability {
    Probability::new(v).unwrap()
}

/// All sign changes of `f` on a log-spaced sweep of `(lo, hi)`, each refined
/// by plain bisection.
fn sweep_roots(f: impl Fn(f64) -> f64, lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    let grid: Vec<f64> = (0..=steps)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / steps as f64).exp())
        .collect();
    let mut out = Vec::new();
    for w in grid.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        let (fa, fb) = (f(a), f(b));
        if fa == 0.0 {
            out.push(a);
            continue;
        }
        if fa.signum() == fb.signum() {
            continue;
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if f(m).signum() == f(a).signum() {
                a = m;
            } else {
                b = m;
            }
        }
        out.push(0.5 * (a + b));
    }
    out
}

#[test]
fn cubic_roots_match_bisection_sweep() {
    let task = CalibrationTask::new(0.25, 0.125, 0.05).unwrap();
    let poly = cubic_coefficients(&task);
    let positive: Vec<f64> = solve_cubic_real(&poly)
        .unwrap()
        .into_iter()
        .filter(|&r| r > 0.0)
        .collect();
    let swept = sweep_roots(|x| poly.eval(x), 1e-6, 1e3, 200_000);
    assert_eq!(positive.len(), swept.len(), "{positive:?} vs {swept:?}");
    for (a, b) in positive.iter().zip(&swept) {
        assert!((a - b).abs() < 1e-8, "{a} vs {b}");
    }
}

#[test]
fn conditional_or_maximizes_likelihood() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let risks: Vec<f64> = (0..50).map(|_| rng.random_range(0.02..0.9)).collect();
    let outcomes: Vec<u8> = risks
        .iter()
        .map(|&r| u8::from(rng.random::<f64>() < 0.7 * r))
        .collect();
    let cohort = LabeledCohort::new(risks.clone(), outcomes.clone()).unwrap();

    let loglik = |a: f64| -> f64 {
        risks
            .iter()
            .zip(&outcomes)
            .map(|(&r, &y)| {
                let q = 1.0 / (1.0 + (-(a + (r / (1.0 - r)).ln())).exp());
                if y == 1 {
                    q.ln()
                } else {
                    (1.0 - q).ln()
                }
            })
            .sum()
    };
    // coarse grid, then golden section around the best cell
    let grid: Vec<f64> = (0..=1000)
        .map(|i| -5.0 + 10.0 * i as f64 / 1000.0)
        .collect();
    let best = grid
        .iter()
        .copied()
        .max_by(|a, b| loglik(*a).total_cmp(&loglik(*b)))
        .unwrap();
    let (mut lo, mut hi) = (best - 0.01, best + 0.01);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    while hi - lo > 1e-12 {
        let c = hi - g * (hi - lo);
        let d = lo + g * (hi - lo);
        if loglik(c) > loglik(d) {
            hi = d;
        } else {
            lo = c;
        }
    }
    let oracle = (0.5 * (lo + hi)).exp();
    let fitted = conditional_or_exact(&cohort).unwrap().get();
    assert!((fitted - oracle).abs() < 1e-6, "{fitted} vs {oracle}");
}

#[test]
fn expected_mean_matches_monte_carlo() {
    let params = BetaParams::new(2.0, 3.0).unwrap();
    let x = 0.5;
    let draws = sample_beta(params, 10_000_000, 2024).unwrap();
    let vals: Vec<f64> = draws
        .risks()
        .iter()
        .map(|&r| r * x / (1.0 - r + r * x))
        .collect();
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    let sd = (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let quad = expected_updated_mean(params, OddsRatio::new(x).unwrap());
    assert!(
        (quad - mean).abs() < 3.0 * sd / n.sqrt(),
        "{quad} vs {mean}"
    );
}

#[test]
fn exact_or_matches_large_sample() {
    let p0 = p(0.25);
    let p1 = p(0.25 * 0.75);
    let params = beta_from_moments(p0, 0.0375).unwrap();
    let exact = exact_or_beta(params, p1).unwrap().get();

    let n = 1_000_000;
    let sample = sample_beta(params, n, 99).unwrap();
    let empirical = population_or(&sample, p1).unwrap().get();

    // sampling error of the mean updated risk, mapped to the odds-ratio
    // scale through the slope of E f(pi, x) in x
    let vals: Vec<f64> = sample
        .risks()
        .iter()
        .map(|&r| r * exact / (1.0 - r + r * exact))
        .collect();
    let mean = vals.iter().sum::<f64>() / n as f64;
    let sd = (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64).sqrt();
    let h = 1e-6;
    let slope = (expected_updated_mean(params, OddsRatio::new(exact + h).unwrap())
        - expected_updated_mean(params, OddsRatio::new(exact - h).unwrap()))
        / (2.0 * h);
    let se = sd / (n as f64).sqrt() / slope;
    assert!(
        (exact - empirical).abs() < 4.0 * se,
        "{exact} vs {empirical} (se {se})"
    );
}

#[test]
fn auc_beta_matches_simulated_outcomes() {
    let params = beta_from_moments(p(0.25), 0.026).unwrap();
    let n = 1_000_000;
    let risks = sample_beta(params, n, 5).unwrap().into_inner();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let outcomes: Vec<u8> = risks
        .iter()
        .map(|&r| u8::from(rng.random::<f64>() < r))
        .collect();
    let cohort = LabeledCohort::new(risks, outcomes).unwrap();
    let empirical = auc_empirical(&cohort).unwrap();
    let population = auc_beta(params);
    assert!(
        (empirical - population).abs() < 0.003,
        "{empirical} vs {population}"
    );
}

#[test]
fn sampled_moments() {
    let n = 100_000;
    let uniform = sample_beta(BetaParams::new(1.0, 1.0).unwrap(), n, 7).unwrap();
    let m = moments(&uniform);
    let se = (1.0 / 12f64).sqrt() / (n as f64).sqrt();
    assert!((m.mean.get() - 0.5).abs() < 4.0 * se);

    let b22 = sample_beta(BetaParams::new(2.0, 2.0).unwrap(), n, 1).unwrap();
    let m = moments(&b22);
    // Var of (X - mu)^2 for beta(2, 2): E(X-mu)^4 - v^2 with E(X-mu)^4 = 3/560
    let fourth = 3.0 / 560.0;
    let se_var = ((fourth - 0.05f64 * 0.05) / n as f64).sqrt();
    assert!((m.variance - 0.05).abs() < 4.0 * se_var, "{}", m.variance);
}

#[test]
fn beta_cdf_matches_incomplete_beta() {
    use statrs::function::beta::beta_reg;
    for &(a, b) in &[(0.3, 2.7), (1.0, 1.0), (2.0, 5.0), (0.8, 0.6), (30.0, 70.0)] {
        let rule = BetaRule::new(BetaParams::new(a, b).unwrap());
        for i in 1..20 {
            let t = i as f64 / 20.0;
            let expected = beta_reg(a, b, t);
            assert!(
                (rule.cdf(t) - expected).abs() < 1e-9,
                "beta({a},{b}) at {t}"
            );
        }
    }
}

#[test]
fn score_identity_on_random_cohort() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let risks = sample_beta(BetaParams::new(1.5, 4.0).unwrap(), 1000, 8).unwrap();
    let outcomes: Vec<u8> = risks
        .risks()
        .iter()
        .map(|&r| u8::from(rng.random::<f64>() < 0.8 * r))
        .collect();
    let labeled = LabeledCohort::new(risks.risks().to_vec(), outcomes).unwrap();
    let exact = conditional_or_exact(&labeled).unwrap().get();
    let pop = population_or(&risks, p(labeled.outcome_mean()))
        .unwrap()
        .get();
    assert!((exact - pop).abs() < 1e-8, "{exact} vs {pop}");
    let updated = apply_update(&risks, OddsRatio::new(exact).unwrap());
    assert!((moments(&updated).mean.get() - labeled.outcome_mean()).abs() < 1e-8);
}
