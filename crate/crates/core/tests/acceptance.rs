//! End-to-end acceptance checks. Prints one line per criterion and exits
//! non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use recal_core::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn within(value: f64, target: f64, tol: f64) -> bool {
    (value - target).abs() <= tol
}

fn prob(x: f64) -> Probability {
    Probability::new(x).unwrap()
}

fn worked_example() -> LabeledCohort {
    let mut risks = vec![1.0 / 7.0; 10];
    risks.extend([0.6; 10]);
    let mut outcomes = vec![0u8; 20];
    outcomes[0] = 1;
    for y in &mut outcomes[10..15] {
        *y = 1;
    }
    LabeledCohort::new(risks, outcomes).unwrap()
}

fn worked_example_check() -> Outcome {
    let cohort = worked_example();
    let mean = moments(cohort.risks()).mean;
    let simple = marginal_or(mean, prob(0.3)).get();
    let exact = conditional_or_exact(&cohort).unwrap().get();
    check(
        within(simple, 0.725, 0.001) && within(exact, 0.6667, 1e-4),
        format!("marginal {simple:.6} (0.725 +/- 0.001), exact {exact:.6} (0.6667 +/- 1e-4)"),
    )
}

fn pain_model() -> Outcome {
    let simple = marginal_or(prob(0.577), prob(0.361)).get();
    let taylor = taylor_or(&CalibrationTask::new(0.577, 0.361, 0.025).unwrap())
        .unwrap()
        .get();
    check(
        within(simple, 0.414, 0.001) && within(taylor, 0.375, 0.003),
        format!("simple {simple:.6} (0.414 +/- 0.001), taylor {taylor:.6} (0.375 +/- 0.003)"),
    )
}

fn case_study() -> Outcome {
    let cases = [
        (0.56, 0.34, 0.025, 0.403, 0.362),
        (0.183, 0.079, 0.024, 0.381, 0.337),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (p0, p1, v, want_simple, want_taylor) in cases {
        let simple = marginal_or(prob(p0), prob(p1)).get();
        let taylor = taylor_or(&CalibrationTask::new(p0, p1, v).unwrap()).map(|x| x.get());
        let simple_ok = within(simple, want_simple, 0.003);
        let taylor_ok = matches!(taylor, Ok(t) if within(t, want_taylor, 0.003));
        pass &= simple_ok && taylor_ok;
        parts.push(format!(
            "({p0}, {p1}, {v}): simple {simple:.4} vs {want_simple} [{}], taylor {} vs {want_taylor} [{}]",
            ok(simple_ok),
            taylor.map_or_else(|e| e.to_string(), |t| format!("{t:.4}")),
            ok(taylor_ok)
        ));
    }
    check(pass, parts.join("; "))
}

fn random_task(rng: &mut ChaCha8Rng) -> CalibrationTask {
    loop {
        let p0 = rng.random_range(0.01..0.99);
        let p1 = rng.random_range(0.01..0.99);
        let v = rng.random::<f64>() * p0 * (1.0 - p0);
        if let Ok(t) = CalibrationTask::new(p0, p1, v) {
            return t;
        }
    }
}

fn analytic_numeric() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut worst, mut both_err, mut mismatched) = (0.0f64, 0, Vec::new());
    for _ in 0..1000 {
        let task = random_task(&mut rng);
        match (taylor_or(&task), taylor_or_numeric(&task)) {
            (Ok(a), Ok(b)) => worst = worst.max((a.get() - b.get()).abs()),
            (Err(_), Err(_)) => both_err += 1,
            (a, b) => mismatched.push(format!("{task:?}: {a:?} vs {b:?}")),
        }
    }
    check(
        worst < 1e-10 && mismatched.is_empty(),
        format!(
            "max |closed - bisection| = {worst:.2e} (< 1e-10); {both_err} tasks without an admissible root in both; {} mismatched{}",
            mismatched.len(),
            mismatched.first().map_or(String::new(), |m| format!(", e.g. {m}"))
        ),
    )
}

fn jensen_direction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut wrong_sign, mut worst_restore) = (0, 0.0f64);
    let mut cohorts = 0;
    while cohorts < 200 {
        let mean = rng.random_range(0.05..0.95);
        let frac = rng.random_range(0.02..0.8);
        let params = beta_from_moments(prob(mean), frac * mean * (1.0 - mean)).unwrap();
        let cohort = sample_beta_stream(params, 2000, 5, cohorts as u64).unwrap();
        let m = moments(&cohort);
        let p0 = m.mean.get();
        let p1 = (p0 * rng.random_range(0.3..1.7)).clamp(0.01, 0.99);
        if m.variance <= 0.0 || (p1 - p0).abs() < 1e-3 {
            continue;
        }
        cohorts += 1;
        let p1 = prob(p1);
        let after_marginal = moments(&apply_update(&cohort, marginal_or(m.mean, p1)))
            .mean
            .get();
        if (after_marginal - p1.get()).signum() != (p0 - p1.get()).signum() {
            wrong_sign += 1;
        }
        let after_exact = moments(&apply_update(&cohort, population_or(&cohort, p1).unwrap()))
            .mean
            .get();
        worst_restore = worst_restore.max((after_exact - p1.get()).abs());
    }
    check(
        wrong_sign == 0 && worst_restore < 1e-8,
        format!("{wrong_sign}/200 residuals with the wrong sign; max |mean - p1| after exact update {worst_restore:.2e} (< 1e-8)"),
    )
}

fn bias_grid() -> Outcome {
    let out = figure1_grid().unwrap();
    let rows = &out.rows;

    let a_fail: Vec<&ScenarioRow> = rows
        .iter()
        .filter(|r| r.auc <= 0.9 && r.relbias_taylor.abs() > 0.5 * r.relbias_simple.abs())
        .collect();

    let mut b_fail = 0;
    for w in rows.windows(2) {
        let same_panel = w[0].p0 == w[1].p0 && w[0].delta == w[1].delta;
        if same_panel && w[1].relbias_simple.abs() < w[0].relbias_simple.abs() {
            b_fail += 1;
        }
    }

    // the claimed regime: p0 = 0.1, +50%, variance above about 0.026
    const CUT: f64 = 0.026;
    let in_regime = |r: &ScenarioRow| r.p0 == 0.1 && r.delta == 0.5 && r.variance > CUT * 0.9;
    let taylor_worse = |r: &ScenarioRow| r.relbias_taylor.abs() > r.relbias_simple.abs();
    let outside: Vec<&ScenarioRow> = rows
        .iter()
        .filter(|r| taylor_worse(r) && !in_regime(r))
        .collect();
    let missed: Vec<&ScenarioRow> = rows
        .iter()
        .filter(|r| r.p0 == 0.1 && r.delta == 0.5 && r.variance > CUT * 1.1 && !taylor_worse(r))
        .collect();

    let describe = |rs: &[&ScenarioRow]| {
        rs.iter()
            .take(4)
            .map(|r| {
                format!(
                    "(p0 {}, delta {:+}, v {:.4}, auc {:.3}: simple {:.3}, taylor {:.3})",
                    r.p0, r.delta, r.variance, r.auc, r.relbias_simple, r.relbias_taylor
                )
            })
            .collect::<Vec<_>>()
            .join(" ")
    };
    check(
        a_fail.is_empty() && b_fail == 0 && outside.is_empty() && missed.is_empty() && out.warnings.is_empty(),
        format!(
            "{} rows, {} warnings; (a) {} rows with auc <= 0.9 keep more than half the bias {}; (b) {} monotonicity breaks; \
             (c) {} rows outside the stated regime with Taylor worse {}, {} rows inside it with Taylor not worse {}",
            rows.len(),
            out.warnings.len(),
            a_fail.len(),
            describe(&a_fail),
            b_fail,
            outside.len(),
            describe(&outside),
            missed.len(),
            describe(&missed)
        ),
    )
}

fn score_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut worst = 0.0f64;
    let mut done = 0;
    while done < 100 {
        let n = rng.random_range(20..400);
        let a = rng.random_range(0.3..5.0);
        let b = rng.random_range(0.3..5.0);
        let risks = sample_beta(BetaParams::new(a, b).unwrap(), n, rng.random())
            .unwrap()
            .into_inner();
        let shift = rng.random_range(0.3..3.0);
        let outcomes: Vec<u8> = risks
            .iter()
            .map(|&r| u8::from(rng.random::<f64>() < r * shift / (1.0 - r + r * shift)))
            .collect();
        let Ok(labeled) = LabeledCohort::new(risks, outcomes) else {
            continue;
        };
        let events = labeled.events();
        if events == 0 || events == labeled.len() {
            continue;
        }
        done += 1;
        let exact = conditional_or_exact(&labeled).unwrap().get();
        let pop = population_or(labeled.risks(), prob(labeled.outcome_mean()))
            .unwrap()
            .get();
        worst = worst.max((exact - pop).abs());
    }
    check(
        worst < 1e-8,
        format!("max |conditional - population| = {worst:.2e} (< 1e-8)"),
    )
}

fn sign_change_roots(poly: &CubicPoly, lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    let mut out = Vec::new();
    let at = |i: usize| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / steps as f64).exp();
    for i in 0..steps {
        let (mut a, mut b) = (at(i), at(i + 1));
        if poly.eval(a).signum() == poly.eval(b).signum() {
            continue;
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if poly.eval(m).signum() == poly.eval(a).signum() {
                a = m;
            } else {
                b = m;
            }
        }
        out.push(0.5 * (a + b));
    }
    out
}

fn oracles() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;

    // cubic roots against bisection sweeps on (1e-6, 1e3)
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut tasks = vec![CalibrationTask::new(0.25, 0.125, 0.05).unwrap()];
    tasks.extend((0..50).map(|_| random_task(&mut rng)));
    let mut cubic_bad = 0;
    for task in &tasks {
        let poly = cubic_coefficients(task);
        let solved: Vec<f64> = solve_cubic_real(&poly)
            .unwrap()
            .into_iter()
            .filter(|&r| r > 1e-6 && r < 1e3)
            .collect();
        let swept = sign_change_roots(&poly, 1e-6, 1e3, 100_000);
        let matched = solved.len() == swept.len()
            && solved.iter().zip(&swept).all(|(a, b)| (a - b).abs() < 1e-8);
        if !matched {
            cubic_bad += 1;
        }
    }
    pass &= cubic_bad == 0;
    parts.push(format!(
        "cubic vs bisection: {cubic_bad}/{} disagree [{}]",
        tasks.len(),
        ok(cubic_bad == 0)
    ));

    let uniform = BetaParams::new(1.0, 1.0).unwrap();
    let e = expected_updated_mean(uniform, OddsRatio::new(2.0).unwrap());
    let want = 2.0 - 2.0 * 2f64.ln();
    let e_ok = within(e, want, 1e-10);
    pass &= e_ok;
    parts.push(format!("E f(U, 2) = {e:.12} vs {want:.12} [{}]", ok(e_ok)));

    let auc = auc_beta(uniform);
    let auc_ok = within(auc, 2.0 / 3.0, 1e-6);
    pass &= auc_ok;
    parts.push(format!("auc_beta(1, 1) = {auc:.9} vs 2/3 [{}]", ok(auc_ok)));

    let mut auc_bad = 0;
    for trial in 0..200 {
        let n = 2 + trial % 199;
        let risks: Vec<f64> = (0..n)
            .map(|_| (rng.random_range(0..25) as f64 + 0.5) / 25.0)
            .collect();
        let mut outcomes: Vec<u8> = (0..n).map(|_| u8::from(rng.random::<bool>())).collect();
        outcomes[0] = 1;
        outcomes[1] = 0;
        let labeled = LabeledCohort::new(risks.clone(), outcomes.clone()).unwrap();
        let (mut twice, mut pairs) = (0u64, 0u64);
        for i in 0..n {
            for j in 0..n {
                if outcomes[i] == 1 && outcomes[j] == 0 {
                    pairs += 1;
                    twice += match risks[i].partial_cmp(&risks[j]).unwrap() {
                        std::cmp::Ordering::Greater => 2,
                        std::cmp::Ordering::Equal => 1,
                        std::cmp::Ordering::Less => 0,
                    };
                }
            }
        }
        if auc_empirical(&labeled).unwrap() != twice as f64 / (2 * pairs) as f64 {
            auc_bad += 1;
        }
    }
    pass &= auc_bad == 0;
    parts.push(format!(
        "auc_empirical vs pair count: {auc_bad}/200 differ [{}]",
        ok(auc_bad == 0)
    ));

    check(pass, parts.join("; "))
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "FAIL"
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, u64, fn() -> Outcome); 8] = [
        ("worked example", 1, worked_example_check),
        ("pain model update", 1, pain_model),
        ("two-trial case study", 1, case_study),
        ("closed form vs bisection", 5, analytic_numeric),
        ("under-correction direction", 30, jensen_direction),
        ("bias grid", 60, bias_grid),
        ("score identity", 10, score_identity),
        ("oracle equivalences", 60, oracles),
    ];
    let mut failures = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(*limit);
        let pass = outcome.pass && in_time;
        failures += usize::from(!pass);
        println!(
            "criterion {}: {} {name} ({:.2}s, limit {limit}s): {}",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            outcome.detail
        );
    }
    println!(
        "acceptance: {}/{} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
