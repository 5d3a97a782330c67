//! Property tests for the crate-wide invariants: serialization round-trips,
//! CDF consistency, page-order insensitivity, and stop-mass stability.

use baitmenu::evaluator::exact_revenue;
use baitmenu::{FiniteDistribution, Mechanism, MenuPage, Supply};
use proptest::prelude::*;

fn distribution() -> impl Strategy<Value = FiniteDistribution> {
    (2usize..=4)
        .prop_flat_map(|n| {
            (
                proptest::collection::vec(0.1f64..100.0, n),
                proptest::collection::vec(0.05f64..1.0, n),
            )
        })
        .prop_filter_map("support points must be separated", |(mut vals, weights)| {
            vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
            if vals.windows(2).any(|w| w[1] - w[0] < 1e-3) {
                return None;
            }
            let total: f64 = weights.iter().sum();
            let mut probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
            let head: f64 = probs[..probs.len() - 1].iter().sum();
            let last = probs.len() - 1;
            probs[last] = 1.0 - head;
            FiniteDistribution::new(vals, probs).ok()
        })
}

fn mechanism() -> impl Strategy<Value = Mechanism> {
    (
        proptest::collection::vec(proptest::collection::vec(0.0f64..120.0, 1..=2), 1..=4),
        0.05f64..3.0,
    )
        .prop_map(|(pages, delta)| {
            Mechanism::new(
                2,
                delta,
                Supply::Unbounded,
                pages.into_iter().map(MenuPage::new).collect(),
            )
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distribution_round_trips_through_json(f in distribution()) {
        let text = serde_json::to_string(&f).unwrap();
        let back: FiniteDistribution = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(f, back);
    }

    #[test]
    fn mechanism_round_trips_through_json(mech in mechanism()) {
        let text = serde_json::to_string(&mech).unwrap();
        let back: Mechanism = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(mech, back);
    }

    #[test]
    fn cdf_strict_never_exceeds_cdf(f in distribution(), x in -10.0f64..150.0) {
        prop_assert!(f.cdf_strict(x) <= f.cdf(x));
        prop_assert_eq!(f.cdf_strict(f.min_value()), 0.0);
        prop_assert_eq!(f.cdf(f.max_value()), 1.0);
    }

    #[test]
    fn revenue_ignores_price_order_within_pages(f in distribution(), mech in mechanism()) {
        let base = exact_revenue(&mech, &f);
        let mut shuffled = mech.clone();
        for page in shuffled.pages.iter_mut() {
            page.prices.reverse();
        }
        let swapped = exact_revenue(&shuffled, &f);
        prop_assert!((base.expected_revenue - swapped.expected_revenue).abs() < 1e-9);
        prop_assert!((base.sale_probability - swapped.sale_probability).abs() < 1e-9);
    }

    #[test]
    fn trailing_page_deletion_preserves_earlier_stops(f in distribution(), mech in mechanism()) {
        prop_assume!(mech.pages.len() >= 2);
        let full = exact_revenue(&mech, &f);
        let mut short = mech.clone();
        short.pages.pop();
        let cut = exact_revenue(&short, &f);
        for t in 0..short.pages.len() {
            prop_assert!((full.stop_probabilities[t] - cut.stop_probabilities[t]).abs() < 1e-9);
        }
    }

    #[test]
    fn stop_probabilities_partition_the_mass(f in distribution(), mech in mechanism()) {
        let report = exact_revenue(&mech, &f);
        let total: f64 = report.stop_probabilities.iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
        prop_assert!(report.expected_revenue <= 120.0 * report.sale_probability + 1e-9);
    }
}
