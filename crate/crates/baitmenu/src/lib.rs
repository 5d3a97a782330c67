//! Revenue analysis for paged posted-price menus shown to an impatient,
//! unit-demand buyer with i.i.d. values.
//!
//! The buyer is shown menu pages one at a time. Each page carries at most `k`
//! priced items; browsing one more page costs `delta` in utility. The buyer
//! keeps going only while the best offer on the current page improves on the
//! previous page's best by at least `delta`, then stops and takes the best
//! offer seen so far (highest price on ties).
//!
//! The crate provides:
//! - exact expected-revenue computation by propagating the buyer's state
//!   distribution page by page ([`evaluator::exact_revenue`]),
//! - a seeded Monte Carlo estimator ([`evaluator::monte_carlo_revenue`]),
//! - static pricing benchmarks: uniform pricing, greedy menus, sequential
//!   posted pricing ([`oracles`]),
//! - a dynamic-programming synthesizer for "bait" mechanisms that keep the
//!   buyer browsing with cheap items while selling expensive ones
//!   ([`synthesis::synthesize`]),
//! - a numerical verification harness for the structural identities the
//!   design relies on ([`verify`]).

pub mod buyer;
pub mod dist;
pub mod evaluator;
pub mod model;
pub mod num;
pub mod oracles;
pub mod showcase;
pub mod synthesis;
pub mod verify;

pub use dist::FiniteDistribution;
pub use model::{Label, Mechanism, MenuPage, PurchaseOutcome, Supply, ValuationProfile};

/// Errors surfaced by library operations. Validation problems are reported as
/// data by [`model::validate`], not through this type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("profile carries {got} values but the mechanism lists {expected} items")]
    ProfileLength { expected: usize, got: usize },
    #[error("search space of {size:.3e} layouts exceeds the cap of {cap:.3e}")]
    SearchSpace { size: f64, cap: f64 },
    #[error("no feasible two-price pair found (bracket miss probability {epsilon}); this indicates a bug")]
    NoFeasiblePair { epsilon: f64 },
}
