//! Static pricing benchmarks: uniform pricing, greedy menus, and sequential
//! posted pricing.
//!
//! A sale happens at exact price equality (a buyer with `v = p` buys at
//! utility zero), so sale probabilities use the strict CDF `Pr[v < p]`.
//! Optimal posted prices are searched over the support only: between support
//! points the sale probability is constant while revenue rises linearly with
//! the price, so some support point always attains the optimum.

use crate::dist::FiniteDistribution;
use crate::num::TOL;

/// An ordered list of posted prices (a greedy menu / SPM price vector).
#[derive(Debug, Clone, PartialEq)]
pub struct PricePolicy {
    pub prices: Vec<f64>,
}

/// Expected revenue of `ell` items uniformly priced at `p`:
/// `(1 - Pr[v < p]^ell) * p`.
pub fn uniform_price_revenue(ell: usize, p: f64, f: &FiniteDistribution) -> f64 {
    debug_assert!(ell >= 1 && p >= 0.0);
    (1.0 - f.cdf_strict(p).powi(ell as i32)) * p
}

/// Best uniform price over `ell` items: the revenue-maximizing support point,
/// lower price on ties.
pub fn optimal_uniform_price(ell: usize, f: &FiniteDistribution) -> (f64, f64) {
    debug_assert!(ell >= 1);
    let mut best = (f.support()[0], uniform_price_revenue(ell, f.support()[0], f));
    for &p in &f.support()[1..] {
        let rev = uniform_price_revenue(ell, p, f);
        if rev > best.1 + TOL {
            best = (p, rev);
        }
    }
    best
}

/// Expected revenue from a greedy buyer who scans the menu in descending
/// price order and takes the first offer with nonnegative utility.
pub fn greedy_revenue(menu: &[f64], f: &FiniteDistribution) -> f64 {
    let mut prices = menu.to_vec();
    prices.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut revenue = 0.0;
    let mut reject_all_before = 1.0;
    for p in prices {
        revenue += p * f.survival(p) * reject_all_before;
        reject_all_before *= f.cdf_strict(p);
    }
    revenue
}

/// Optimal sequential posted pricing of one item to `n` i.i.d. buyers, via
/// backward induction over the remaining-buyer count. Returns the induced
/// price sequence (most buyers remaining first) and its revenue.
pub fn optimal_spm(n: usize, f: &FiniteDistribution) -> (PricePolicy, f64) {
    debug_assert!(n >= 1);
    // values[t] = optimal continuation revenue with t buyers left
    let mut values = vec![0.0_f64; n + 1];
    let mut choices = vec![0.0_f64; n + 1];
    for t in 1..=n {
        let mut best = (f.support()[0], f64::NEG_INFINITY);
        for &p in f.support() {
            let rev = f.survival(p) * p + f.cdf_strict(p) * values[t - 1];
            if rev > best.1 + TOL {
                best = (p, rev);
            }
        }
        choices[t] = best.0;
        values[t] = best.1;
    }
    let prices = (1..=n).rev().map(|t| choices[t]).collect();
    (PricePolicy { prices }, values[n])
}

/// Optimal uniform-price SPM; identical to the best uniform price over `n`
/// items.
pub fn optimal_uspm(n: usize, f: &FiniteDistribution) -> (f64, f64) {
    optimal_uniform_price(n, f)
}
