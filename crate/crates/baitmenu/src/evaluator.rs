//! Exact expected revenue by state-distribution propagation, and seeded
//! Monte Carlo estimation.
//!
//! The exact evaluator pushes the joint law of (previous-page utility,
//! best-so-far offer) through each page's outcome distribution. States that
//! agree after snapping utilities to the 1e-9 grid are merged, which keeps
//! the state space proportional to the number of distinct page outcomes
//! rather than the number of value profiles.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::buyer::{run_buyer, BestOffer};
use crate::dist::FiniteDistribution;
use crate::model::{label_rank, Label, Mechanism, MenuPage};
use crate::num::{approx_ge, canon, price_key, util_key};

/// Samples per RNG stream; the estimate is invariant to how chunks are
/// scheduled because partial sums combine in chunk order.
const MC_CHUNK: usize = 8192;

/// One atom of a page's outcome law: the page utility, the tie-broken best
/// price (highest among utility maximizers, expensive label winning residual
/// ties), and its probability. The empty page has the single atom
/// `(-inf, None, None, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PageAtom {
    pub utility: f64,
    pub price: Option<f64>,
    pub label: Option<Label>,
    pub prob: f64,
}

/// Exact joint law of (max utility on a page, tie-broken best price).
#[derive(Debug, Clone, PartialEq)]
pub struct PageOutcomeDistribution {
    pub atoms: Vec<PageAtom>,
}

impl PageOutcomeDistribution {
    pub fn total_prob(&self) -> f64 {
        self.atoms.iter().map(|a| a.prob).sum()
    }
}

/// Compute the exact outcome law of a single page.
pub fn page_outcome_distribution(page: &MenuPage, f: &FiniteDistribution) -> PageOutcomeDistribution {
    if page.is_empty() {
        return PageOutcomeDistribution {
            atoms: vec![PageAtom {
                utility: f64::NEG_INFINITY,
                price: None,
                label: None,
                prob: 1.0,
            }],
        };
    }

    // Group offers by (price, label); groups are ranked so that a tie at the
    // max utility resolves to the highest (price, label-rank) group.
    let mut groups: BTreeMap<(i64, u8), (f64, Option<Label>, i32)> = BTreeMap::new();
    for (i, &price) in page.prices.iter().enumerate() {
        let label = page.label(i);
        let entry = groups
            .entry((util_key(price), label_rank(label)))
            .or_insert((price, label, 0));
        entry.0 = entry.0.max(price);
        entry.2 += 1;
    }
    let groups: Vec<(f64, Option<Label>, i32)> = groups.into_values().collect();

    let mut atoms: BTreeMap<(i64, i64, u8), PageAtom> = BTreeMap::new();
    for (gi, &(price, label, count)) in groups.iter().enumerate() {
        for (v, _) in f.atoms() {
            let w = canon(v - price);
            let x = price + w;
            // at least one offer in this group attains w, none exceeds it
            let own = f.cdf(x).powi(count) - f.cdf_strict(x).powi(count);
            if own <= 0.0 {
                continue;
            }
            let mut prob = own;
            for (oi, &(other_price, _, other_count)) in groups.iter().enumerate() {
                if oi == gi {
                    continue;
                }
                let y = other_price + w;
                // higher-ranked groups must stay strictly below w or they
                // would steal the tie; lower-ranked ones may reach it
                prob *= if oi > gi {
                    f.cdf_strict(y).powi(other_count)
                } else {
                    f.cdf(y).powi(other_count)
                };
            }
            if prob <= 0.0 {
                continue;
            }
            let key = (util_key(w), price_key(Some(price)), label_rank(label));
            atoms
                .entry(key)
                .and_modify(|a| a.prob += prob)
                .or_insert(PageAtom {
                    utility: w,
                    price: Some(price),
                    label,
                    prob,
                });
        }
    }
    let atoms: Vec<PageAtom> = atoms.into_values().filter(|a| a.prob > 1e-15).collect();
    debug_assert!(
        (atoms.iter().map(|a| a.prob).sum::<f64>() - 1.0).abs() < 1e-9,
        "page outcome law does not sum to 1"
    );
    PageOutcomeDistribution { atoms }
}

/// What the exact evaluator reports for one mechanism.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RevenueReport {
    pub expected_revenue: f64,
    pub sale_probability: f64,
    /// `stop_probabilities[t]` is the chance the buyer stops on page `t + 1`;
    /// the last entry is the implicit empty page after the listed menu.
    pub stop_probabilities: Vec<f64>,
    pub expected_buyer_utility: f64,
    /// Present when the mechanism carries bait/expensive labels.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expensive_sale_probability: Option<f64>,
}

impl RevenueReport {
    pub fn csv_header() -> &'static str {
        "revenue,sale_prob,buyer_utility,expensive_sale_prob"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{}",
            self.expected_revenue,
            self.sale_probability,
            self.expected_buyer_utility,
            self.expensive_sale_probability
                .map(|p| p.to_string())
                .unwrap_or_default()
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct StateKey {
    prev: i64,
    best_utility: i64,
    best_price: i64,
    best_rank: u8,
}

#[derive(Debug, Clone, Copy)]
struct State {
    u_prev: f64,
    best: BestOffer,
    mass: f64,
}

/// Exact expected revenue and stop statistics under the buyer semantics.
pub fn exact_revenue(mech: &Mechanism, f: &FiniteDistribution) -> RevenueReport {
    let mut states: BTreeMap<StateKey, State> = BTreeMap::new();
    states.insert(
        StateKey {
            prev: util_key(0.0),
            best_utility: util_key(f64::NEG_INFINITY),
            best_price: price_key(None),
            best_rank: 0,
        },
        State {
            u_prev: 0.0,
            best: BestOffer::NONE,
            mass: 1.0,
        },
    );

    let pages = mech.pages.len();
    let mut stop_probabilities = vec![0.0; pages + 1];
    let mut revenue = 0.0;
    let mut sale = 0.0;
    let mut utility = 0.0;
    let mut expensive_sale = 0.0;

    let mut credit = |best: &BestOffer, mass: f64| {
        if let Some(price) = best.price {
            if approx_ge(best.utility, 0.0) {
                revenue += mass * price;
                sale += mass;
                utility += mass * best.utility;
                if best.label == Some(Label::Expensive) {
                    expensive_sale += mass;
                }
            }
        }
    };

    for (t, page) in mech.pages.iter().enumerate() {
        let law = page_outcome_distribution(page, f);
        let mut next: BTreeMap<StateKey, State> = BTreeMap::new();
        for state in states.values() {
            for atom in &law.atoms {
                let mass = state.mass * atom.prob;
                let mut best = state.best;
                best.merge(atom.utility, atom.price, atom.label);
                if approx_ge(atom.utility, state.u_prev + mech.delta) {
                    let key = StateKey {
                        prev: util_key(atom.utility),
                        best_utility: util_key(best.utility),
                        best_price: price_key(best.price),
                        best_rank: label_rank(best.label),
                    };
                    next.entry(key)
                        .and_modify(|s| s.mass += mass)
                        .or_insert(State {
                            u_prev: atom.utility,
                            best,
                            mass,
                        });
                } else {
                    stop_probabilities[t] += mass;
                    credit(&best, mass);
                }
            }
        }
        states = next;
        if states.is_empty() {
            break;
        }
    }
    // implicit empty page: whatever survived stops here
    for state in states.values() {
        stop_probabilities[pages] += state.mass;
        credit(&state.best, state.mass);
    }

    RevenueReport {
        expected_revenue: revenue,
        sale_probability: sale,
        stop_probabilities,
        expected_buyer_utility: utility,
        expensive_sale_probability: mech.has_labels().then_some(expensive_sale),
    }
}

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

impl McEstimate {
    /// Absolute distance to `target` measured in standard errors. A
    /// zero-variance estimate is exact, so it only has to match the target
    /// up to the money tolerance.
    pub fn sigmas_from(&self, target: f64) -> f64 {
        if self.std_error == 0.0 {
            if (self.mean - target).abs() <= crate::num::TOL {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.mean - target).abs() / self.std_error
        }
    }
}

/// Estimate expected revenue from `samples` independent buyer traces.
/// Deterministic for a fixed `(seed, samples)` pair.
pub fn monte_carlo_revenue(
    mech: &Mechanism,
    f: &FiniteDistribution,
    samples: usize,
    seed: u64,
) -> McEstimate {
    assert!(samples >= 1, "need at least one sample");
    let items = mech.total_items();
    let mut values = vec![0.0_f64; items];
    let mut sum = 0.0;
    let mut sum_sq = 0.0;

    let chunks = samples.div_ceil(MC_CHUNK);
    for chunk in 0..chunks {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(chunk as u64 + 1);
        let in_chunk = MC_CHUNK.min(samples - chunk * MC_CHUNK);
        let mut chunk_sum = 0.0;
        let mut chunk_sq = 0.0;
        for _ in 0..in_chunk {
            for v in values.iter_mut() {
                *v = f.sample(&mut rng);
            }
            let (_, best) = run_buyer(mech, &values, None);
            let r = match best.price {
                Some(price) if approx_ge(best.utility, 0.0) => price,
                _ => 0.0,
            };
            chunk_sum += r;
            chunk_sq += r * r;
        }
        sum += chunk_sum;
        sum_sq += chunk_sq;
    }

    let n = samples as f64;
    let mean = sum / n;
    let std_error = if samples > 1 {
        let var = ((sum_sq - sum * sum / n) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    McEstimate {
        mean,
        std_error,
        samples,
    }
}
