//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//!
//! Run with `cargo test -p baitmenu --test acceptance -- --nocapture` to see
//! the per-criterion lines.

use std::time::{Duration, Instant};

use baitmenu::evaluator::{exact_revenue, monte_carlo_revenue};
use baitmenu::oracles::{optimal_spm, optimal_uniform_price, optimal_uspm};
use baitmenu::synthesis::{synthesize, SynthesisParams};
use baitmenu::verify::{
    best_greedy_menu, check_evaluator_enumeration, check_median_containment,
    check_product_eps_bound, check_spm_le_two_uprice, check_synthesis_ratio,
    check_two_price_bracket, check_uprice_subadditivity, enumerate_revenue,
    random_distribution_sized, random_small_mechanism,
};
use baitmenu::{showcase, FiniteDistribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0;

fn report(criterion: usize, name: &str, pass: bool, details: &str) {
    println!(
        "ACCEPTANCE {criterion} ({name}): {} — {details}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} ({name}) failed: {details}");
}

#[test]
fn criterion_1_exact_evaluator_reference_menus() {
    let f = showcase::two_point_prior();

    let t0 = Instant::now();
    let uniform = exact_revenue(&showcase::uniform_menu(), &f).expected_revenue;
    let uniform_time = t0.elapsed();

    let t1 = Instant::now();
    let staircase = exact_revenue(&showcase::staircase_menu(), &f).expected_revenue;
    let staircase_time = t1.elapsed();

    let pass = (uniform - 22.8356).abs() <= 1e-3
        && (staircase - 38.3133).abs() <= 5e-4
        && uniform_time < Duration::from_secs(1)
        && staircase_time < Duration::from_secs(1);
    report(
        1,
        "exact evaluator on the reference menus",
        pass,
        &format!(
            "uniform = {uniform:.6} (want 22.8356 ± 1e-3, {uniform_time:?}), staircase = {staircase:.6} (want 38.3133 ± 5e-4, {staircase_time:?})"
        ),
    );
}

#[test]
fn criterion_2_monte_carlo_agrees_with_exact() {
    let start = Instant::now();
    let f = showcase::two_point_prior();
    let mut worst_sigmas = 0.0_f64;
    let mut checked = 0usize;

    let mut check = |mech: &baitmenu::Mechanism, dist: &FiniteDistribution, seed: u64| {
        let exact = exact_revenue(mech, dist).expected_revenue;
        let est = monte_carlo_revenue(mech, dist, 1_000_000, seed);
        worst_sigmas = worst_sigmas.max(est.sigmas_from(exact));
        checked += 1;
    };

    check(&showcase::uniform_menu(), &f, SEED);
    check(&showcase::staircase_menu(), &f, SEED + 1);

    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    rng.set_stream(100);
    for i in 0..50 {
        let dist = random_distribution_sized(&mut rng, 2);
        let mech = random_small_mechanism(&mut rng, &dist, 4);
        check(&mech, &dist, SEED + 10 + i);
    }

    let elapsed = start.elapsed();
    let pass = worst_sigmas <= 3.0 && elapsed < Duration::from_secs(30);
    report(
        2,
        "Monte Carlo within 3 standard errors of exact",
        pass,
        &format!("{checked} instances, worst deviation {worst_sigmas:.2} sigmas, total {elapsed:?}"),
    );
}

#[test]
fn criterion_3_oracle_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    rng.set_stream(101);
    let mut worst_gap = 0.0_f64;
    let mut instances = 0usize;
    for _ in 0..60 {
        let support_size = rng.gen_range(2..=3usize);
        let f = random_distribution_sized(&mut rng, support_size);
        for n in 1..=4 {
            let (_, spm) = optimal_spm(n, &f);
            let greedy = best_greedy_menu(&f, n);
            worst_gap = worst_gap.max((spm - greedy).abs());
            let (up, ur) = optimal_uniform_price(n, &f);
            let (sp, sr) = optimal_uspm(n, &f);
            worst_gap = worst_gap.max((up - sp).abs().max((ur - sr).abs()));
            instances += 1;
        }
    }
    let pass = worst_gap <= 1e-9;
    report(
        3,
        "SPM equals the best greedy menu and U-SPM equals uniform pricing",
        pass,
        &format!("{instances} (f, n) pairs, worst gap {worst_gap:.3e}"),
    );
}

#[test]
fn criterion_4_property_suites_have_zero_violations() {
    let results = [
        check_uprice_subadditivity(SEED, 200),
        check_spm_le_two_uprice(SEED, 200),
        check_product_eps_bound(SEED, 10_000),
        check_two_price_bracket(SEED, 1000),
        check_median_containment(SEED, 100),
    ];
    let violations: usize = results.iter().map(|r| r.violations).sum();
    let detail: Vec<String> = results
        .iter()
        .map(|r| format!("{}: {}/{} viol (worst {:.3e})", r.claim, r.violations, r.instances, r.worst_slack))
        .collect();
    report(
        4,
        "property suites",
        violations == 0,
        &detail.join("; "),
    );
}

#[test]
fn criterion_5_exact_evaluator_equals_profile_enumeration() {
    let result = check_evaluator_enumeration(SEED, 100);
    report(
        5,
        "state propagation equals full profile enumeration",
        result.passed() && result.worst_slack >= -1e-9,
        &format!(
            "{} mechanisms, worst discrepancy {:.3e}",
            result.instances, -result.worst_slack
        ),
    );
}

#[test]
fn criterion_6_synthesizer_recovers_the_staircase_revenue() {
    let start = Instant::now();
    let f = showcase::two_point_prior();
    let params = SynthesisParams::new(2, 1.0)
        .with_grid_step(1.0)
        .with_margin(0.1);
    let outcome = synthesize(&f, &params);
    let elapsed = start.elapsed();
    let revenue = outcome.best.report.expected_revenue;
    let pass = revenue >= 38.3133 - 1e-4 && elapsed < Duration::from_secs(60);
    report(
        6,
        "synthesizer reaches the staircase revenue",
        pass,
        &format!(
            "best = {} at {revenue:.6} (floor 38.3133 - 1e-4), {} candidates, {elapsed:?}",
            outcome.best.id,
            outcome.candidates.len()
        ),
    );
}

#[test]
fn criterion_7_synthesis_ratio_floor() {
    let (floor, flag) = check_synthesis_ratio(SEED, 20);
    report(
        7,
        "synthesized revenue at least half of the tiny-instance optimum",
        floor.passed(),
        &format!(
            "{} instances, worst ratio {:.4} against the 0.5 floor{}",
            floor.instances,
            floor.worst_slack + 0.5,
            if flag.worst_slack < 0.0 {
                format!(" (flagged: worst ratio sits below the 0.9 line by {:.4})", -flag.worst_slack)
            } else {
                String::new()
            },
        ),
    );
}

/// The reference staircase menu is a member of the synthesizer's candidate
/// family; the argmax can therefore only match or beat it.
#[test]
fn staircase_membership_in_the_candidate_pool() {
    let f = showcase::two_point_prior();
    let params = SynthesisParams::new(2, 1.0)
        .with_grid_step(1.0)
        .with_margin(0.1);
    let outcome = synthesize(&f, &params);
    let reference = showcase::staircase_menu();
    let member = outcome.candidates.iter().find(|c| {
        c.mechanism.pages.len() == reference.pages.len()
            && c.mechanism
                .pages
                .iter()
                .zip(&reference.pages)
                .all(|(a, b)| {
                    let mut pa = a.prices.clone();
                    let mut pb = b.prices.clone();
                    pa.sort_by(|x, y| x.partial_cmp(y).unwrap());
                    pb.sort_by(|x, y| x.partial_cmp(y).unwrap());
                    pa == pb
                })
    });
    let found = member.is_some();
    let rev = member.map(|c| c.report.expected_revenue).unwrap_or(f64::NAN);
    assert!(found, "the reference staircase is missing from the pool");
    assert!(
        (rev - 38.3133).abs() <= 5e-4,
        "pool member scored {rev}, expected 38.3133"
    );
}

/// Cross-check the Monte Carlo estimator against profile enumeration on one
/// nontrivial labeled mechanism.
#[test]
fn monte_carlo_matches_enumeration_on_the_staircase() {
    let f = showcase::two_point_prior();
    let mech = showcase::staircase_menu();
    let (brute, _) = enumerate_revenue(&mech, &f);
    let est = monte_carlo_revenue(&mech, &f, 400_000, 3);
    assert!(
        est.sigmas_from(brute) <= 4.0,
        "MC {} ± {} vs enumeration {brute}",
        est.mean,
        est.std_error
    );
}
