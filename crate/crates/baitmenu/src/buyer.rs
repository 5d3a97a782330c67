//! Deterministic simulation of the impatient buyer.
//!
//! Page by page the buyer computes her page utility `u(t)` (best value minus
//! price among the page's offers, negative infinity for an empty page) and
//! continues exactly when `u(t) >= u(t-1) + delta`; equality continues. After
//! the last listed page an implicit empty page forces a stop. On stopping she
//! takes the best offer seen anywhere so far if its utility is nonnegative,
//! paying the highest price among tied offers.

use crate::model::{label_rank, Label, Mechanism, PurchaseOutcome, ValuationProfile};
use crate::num::{approx_eq, approx_ge};
use crate::Error;

/// The best offer seen so far: utility, price, label. Ordered by utility,
/// then price, then label rank so ties resolve to the highest price.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct BestOffer {
    pub utility: f64,
    pub price: Option<f64>,
    pub label: Option<Label>,
}

impl BestOffer {
    pub(crate) const NONE: BestOffer = BestOffer {
        utility: f64::NEG_INFINITY,
        price: None,
        label: None,
    };

    /// True if `other` beats `self` under (utility, price, label-rank) with
    /// tolerance ties.
    pub(crate) fn is_improved_by(&self, utility: f64, price: Option<f64>, label: Option<Label>) -> bool {
        if !approx_eq(utility, self.utility) {
            return utility > self.utility;
        }
        match (price, self.price) {
            (Some(q), Some(p)) if !approx_eq(q, p) => q > p,
            (Some(_), None) => true,
            (None, _) => false,
            _ => label_rank(label) > label_rank(self.label),
        }
    }

    pub(crate) fn merge(&mut self, utility: f64, price: Option<f64>, label: Option<Label>) {
        if self.is_improved_by(utility, price, label) {
            *self = BestOffer { utility, price, label };
        }
    }
}

/// Full record of one buyer run.
#[derive(Debug, Clone, PartialEq)]
pub struct BuyerTrace {
    /// `u(t)` for every page the buyer saw, including the stop page; the
    /// final entry is negative infinity when she ran off the end of the menu.
    pub page_utilities: Vec<f64>,
    /// Best page utility seen (negative infinity if no offer existed).
    pub best_utility: f64,
    pub best_price: Option<f64>,
    pub best_label: Option<Label>,
    pub outcome: PurchaseOutcome,
}

/// Core buyer loop shared by [`simulate`] and the Monte Carlo estimator.
/// Returns the 1-based stop page and the best offer seen; `sink`, when
/// present, collects the per-page utilities including the stop page.
pub(crate) fn run_buyer(
    mech: &Mechanism,
    values: &[f64],
    mut sink: Option<&mut Vec<f64>>,
) -> (usize, BestOffer) {
    let mut idx = 0usize;
    let mut u_prev = 0.0_f64;
    let mut best = BestOffer::NONE;
    let mut stop_page = mech.pages.len() + 1;

    for (t, page) in mech.pages.iter().enumerate() {
        let mut page_best = BestOffer::NONE;
        for (i, &price) in page.prices.iter().enumerate() {
            let utility = values[idx] - price;
            idx += 1;
            page_best.merge(utility, Some(price), page.label(i));
        }
        let u_t = page_best.utility;
        if let Some(trace) = sink.as_deref_mut() {
            trace.push(u_t);
        }
        // the stop page's own offers count toward the final choice
        best.merge(page_best.utility, page_best.price, page_best.label);
        if approx_ge(u_t, u_prev + mech.delta) {
            u_prev = u_t;
        } else {
            stop_page = t + 1;
            break;
        }
    }
    if stop_page == mech.pages.len() + 1 {
        // implicit empty page: utility -inf always stops
        if let Some(trace) = sink {
            trace.push(f64::NEG_INFINITY);
        }
    }
    (stop_page, best)
}

/// Run one buyer through the mechanism for a fixed valuation profile.
pub fn simulate(mech: &Mechanism, profile: &ValuationProfile) -> Result<BuyerTrace, Error> {
    let expected = mech.total_items();
    if profile.len() != expected {
        return Err(Error::ProfileLength {
            expected,
            got: profile.len(),
        });
    }

    let mut page_utilities = Vec::with_capacity(mech.pages.len() + 1);
    let (stop_page, best) = run_buyer(mech, profile.values(), Some(&mut page_utilities));

    let bought = best.price.is_some() && approx_ge(best.utility, 0.0);
    let outcome = PurchaseOutcome {
        stop_page,
        bought_price: if bought { best.price } else { None },
        buyer_utility: if bought { best.utility } else { 0.0 },
        bought_label: if bought { best.label } else { None },
    };
    Ok(BuyerTrace {
        page_utilities,
        best_utility: best.utility,
        best_price: best.price,
        best_label: best.label,
        outcome,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{MenuPage, Supply};
    use crate::FiniteDistribution;

    fn mech(pages: Vec<Vec<f64>>) -> Mechanism {
        Mechanism::new(2, 1.0, Supply::Unbounded, pages.into_iter().map(MenuPage::new).collect())
    }

    #[test]
    fn uniform_menu_trace_stops_on_small_increment() {
        // pages [9,9],[98.9,98.9], values (10,10,100,10):
        // u(1)=1 continues (equality), u(2)=1.1 < 2 stops; buys 98.9.
        let m = mech(vec![vec![9.0, 9.0], vec![98.9, 98.9]]);
        let trace = simulate(&m, &ValuationProfile(vec![10.0, 10.0, 100.0, 10.0])).unwrap();
        assert_eq!(trace.outcome.stop_page, 2);
        assert_eq!(trace.outcome.bought_price, Some(98.9));
        assert!((trace.outcome.buyer_utility - 1.1).abs() < 1e-9);
    }

    #[test]
    fn empty_mechanism_stops_immediately_buying_nothing() {
        let m = mech(vec![]);
        let trace = simulate(&m, &ValuationProfile(vec![])).unwrap();
        assert_eq!(trace.outcome.stop_page, 1);
        assert_eq!(trace.outcome.bought_price, None);
        assert_eq!(trace.outcome.buyer_utility, 0.0);
        assert_eq!(trace.page_utilities, vec![f64::NEG_INFINITY]);
    }

    #[test]
    fn single_page_tie_pays_highest_price() {
        // page [9,9], values (10,10): both offers tie at utility 1, price 9.
        let m = mech(vec![vec![9.0, 9.0]]);
        let trace = simulate(&m, &ValuationProfile(vec![10.0, 10.0])).unwrap();
        assert_eq!(trace.outcome.stop_page, 2);
        assert_eq!(trace.outcome.bought_price, Some(9.0));
        assert_eq!(trace.outcome.buyer_utility, 1.0);
    }

    #[test]
    fn tie_between_prices_takes_the_expensive_one() {
        // values (10, 100) on prices (10, 100): both utilities 0.
        let m = mech(vec![vec![10.0, 100.0]]);
        let trace = simulate(&m, &ValuationProfile(vec![10.0, 100.0])).unwrap();
        assert_eq!(trace.outcome.bought_price, Some(100.0));
    }

    #[test]
    fn all_ten_pages_seen_when_increments_hit_delta_exactly() {
        // staircase menu, all-10 values: the expensive offers stay deep
        // underwater, the baits give u(t) = t with each increment exactly
        // delta, so the buyer sees every page plus the empty one.
        let m = crate::showcase::staircase_menu();
        let trace = simulate(&m, &ValuationProfile(vec![10.0; 20])).unwrap();
        assert_eq!(trace.outcome.stop_page, 11);
        for (i, u) in trace.page_utilities[..10].iter().enumerate() {
            assert!((u - (i as f64 + 1.0)).abs() < 1e-9);
        }
        assert_eq!(trace.outcome.bought_price, Some(0.0));
        assert_eq!(trace.outcome.bought_label, Some(crate::model::Label::Bait));
        assert_eq!(trace.outcome.buyer_utility, 10.0);
    }

    #[test]
    fn misaligned_profile_is_an_error() {
        let m = mech(vec![vec![9.0, 9.0]]);
        assert!(matches!(
            simulate(&m, &ValuationProfile(vec![10.0])),
            Err(Error::ProfileLength { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn negative_best_utility_buys_nothing() {
        let m = mech(vec![vec![99.0]]);
        let trace = simulate(&m, &ValuationProfile(vec![10.0])).unwrap();
        assert_eq!(trace.outcome.bought_price, None);
        assert_eq!(trace.outcome.buyer_utility, 0.0);
        assert_eq!(trace.best_utility, -89.0);
    }

    #[test]
    fn raising_a_stop_page_value_never_converts_continue_to_stop() {
        let f = FiniteDistribution::new(vec![10.0, 100.0], vec![0.9, 0.1]).unwrap();
        let m = mech(vec![vec![9.0, 9.0], vec![50.0, 3.0]]);
        for seed in 0..200 {
            let profile = crate::model::sample_profile(&m, &f, seed);
            let base = simulate(&m, &profile).unwrap();
            let stop = base.outcome.stop_page;
            if stop > m.pages.len() {
                continue;
            }
            // bump each value on the stop page to the max support value
            let offset: usize = m.pages[..stop - 1].iter().map(|p| p.len()).sum();
            for i in 0..m.pages[stop - 1].len() {
                let mut bumped = profile.clone();
                bumped.0[offset + i] = 100.0;
                let after = simulate(&m, &bumped).unwrap();
                assert!(
                    after.outcome.stop_page >= stop,
                    "raising a value moved the stop earlier (seed {seed})"
                );
            }
        }
    }
}
