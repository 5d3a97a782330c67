//! Construction of approximately optimal bait mechanisms.
//!
//! A bait mechanism keeps the buyer browsing with cheap, likely-liked items
//! (at most two distinct bait prices per page) while exposing expensive
//! items that occasionally win and generate revenue. The synthesizer:
//!
//! 1. runs a dynamic program over (utility upper bound, free expensive
//!    slots) that schedules bait pages whose utility brackets grow by the
//!    search cost per page, so that inside the brackets the buyer never
//!    stops ([`synthesize_bait_dp`]);
//! 2. fills the free slots with expensive items, either uniformly priced
//!    from a grid-derived candidate set or per page via a conditional-sale
//!    test on the next page's bracket law ([`attach_expensive`]);
//! 3. scores every candidate (plus a single-page uniform menu and a family
//!    of closed-form staircase menus) with the exact evaluator and returns
//!    the argmax ([`synthesize`]).

use std::collections::BTreeMap;

use crate::dist::FiniteDistribution;
use crate::evaluator::{exact_revenue, page_outcome_distribution, RevenueReport};
use crate::model::{validate, Label, Mechanism, MenuPage, Supply};
use crate::num::{canon, util_key, TOL};
use crate::oracles::optimal_uniform_price;
use crate::Error;

/// Default acceptance threshold for DP skeletons.
pub const DEFAULT_DP_ACCEPT: f64 = 1.0 / 3.0;

/// Knobs of a synthesis run.
#[derive(Debug, Clone)]
pub struct SynthesisParams {
    /// Page capacity.
    pub k: usize,
    /// Per-page search cost.
    pub delta: f64,
    /// Item supply.
    pub supply: Supply,
    /// Spacing of the utility grid the DP discretizes over.
    pub grid_step: f64,
    /// How far a liked expensive item overshoots the next bait step; keeps
    /// the expensive item the best offer when the buyer stops a page later.
    pub margin: f64,
    /// Minimum success probability a DP skeleton must retain.
    pub dp_accept: f64,
}

impl SynthesisParams {
    /// Defaults: grid step and margin derived from the search cost.
    pub fn new(k: usize, delta: f64) -> Self {
        SynthesisParams {
            k,
            delta,
            supply: Supply::Unbounded,
            grid_step: delta,
            margin: delta / 10.0,
            dp_accept: DEFAULT_DP_ACCEPT,
        }
    }

    pub fn with_supply(mut self, supply: Supply) -> Self {
        self.supply = supply;
        self
    }

    pub fn with_grid_step(mut self, grid_step: f64) -> Self {
        self.grid_step = grid_step;
        self
    }

    pub fn with_margin(mut self, margin: f64) -> Self {
        self.margin = margin;
        self
    }
}

/// Per-page confidence interval for the bait utility. Consecutive brackets
/// satisfy `lower(t) = upper(t-1) + delta`, so inside them the buyer always
/// continues.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UtilityBracket {
    pub lower: f64,
    pub upper: f64,
}

/// One scheduled bait page: at most two distinct prices plus free slots for
/// expensive items.
#[derive(Debug, Clone, PartialEq)]
pub struct BaitPage {
    pub low_price: f64,
    pub high_price: f64,
    pub low_count: usize,
    pub high_count: usize,
    pub free_slots: usize,
    pub bracket: UtilityBracket,
    /// Probability the page utility lands inside the bracket.
    pub bracket_prob: f64,
}

impl BaitPage {
    pub fn size(&self) -> usize {
        self.low_count + self.high_count
    }

    /// The page as a labeled menu page (bait items only).
    pub fn menu_page(&self) -> MenuPage {
        let mut prices = vec![self.low_price; self.low_count];
        prices.resize(self.size(), self.high_price);
        let labels = vec![Label::Bait; prices.len()];
        MenuPage::labeled(prices, labels)
    }

    /// Law of the page utility conditioned on landing inside the bracket.
    pub fn bracket_law(&self, f: &FiniteDistribution) -> Vec<(f64, f64)> {
        let law = page_outcome_distribution(&self.menu_page(), f);
        let mut atoms: Vec<(f64, f64)> = law
            .atoms
            .iter()
            .filter(|a| {
                a.utility.is_finite()
                    && a.utility >= self.bracket.lower - TOL
                    && a.utility <= self.bracket.upper + TOL
            })
            .map(|a| (a.utility, a.prob))
            .collect();
        let total: f64 = atoms.iter().map(|(_, p)| p).sum();
        if total > 0.0 {
            for (_, p) in atoms.iter_mut() {
                *p /= total;
            }
        }
        atoms
    }
}

/// Output of the DP: the full bait-page schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct BaitSkeleton {
    pub pages: Vec<BaitPage>,
    /// Product of the per-page bracket probabilities; exact because page
    /// draws are independent and the brackets are disjoint.
    pub success_probability: f64,
    /// Total free slots available for expensive items.
    pub free_slots: usize,
}

/// The largest eta such that `Pr[v >= p | v >= p - delta] >= eta` for every
/// support price; governs whether one uniform expensive price suffices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpreadingCertificate {
    pub eta: f64,
    pub witness_price: f64,
}

/// Compute the spreading coefficient of a distribution at search cost
/// `delta`.
pub fn spreading_coefficient(f: &FiniteDistribution, delta: f64) -> SpreadingCertificate {
    debug_assert!(delta > 0.0);
    let mut best = SpreadingCertificate {
        eta: f64::INFINITY,
        witness_price: f.support()[0],
    };
    for &p in f.support() {
        let denom = f.survival(p - delta);
        let ratio = if denom > 0.0 { f.survival(p) / denom } else { 1.0 };
        if ratio < best.eta {
            best = SpreadingCertificate {
                eta: ratio,
                witness_price: p,
            };
        }
    }
    best.eta = best.eta.min(1.0);
    best
}

/// `Pr[lower <= max_i (v_i - p_i) <= upper]` for a page of `(price, count)`
/// groups: `prod F(p + upper)^c - prod Pr[v < p + lower]^c`.
pub fn bracket_probability(
    items: &[(f64, usize)],
    bracket: &UtilityBracket,
    f: &FiniteDistribution,
) -> f64 {
    let mut upper = 1.0;
    let mut lower = 1.0;
    for &(p, c) in items {
        upper *= f.cdf(p + bracket.upper).powi(c as i32);
        lower *= f.cdf_strict(p + bracket.lower).powi(c as i32);
    }
    (upper - lower).max(0.0)
}

/// Feasible x-range of `x*u + (n-x)*v >= target` over `x` in `[0, n]`, where
/// `u`, `v` may be negative infinity (log-probabilities of zero).
fn ge_range(u: f64, v: f64, n: f64, target: f64, slack: f64) -> Option<(f64, f64)> {
    let target = target - slack;
    if target == f64::NEG_INFINITY {
        return Some((0.0, n));
    }
    match (u.is_finite(), v.is_finite()) {
        (true, true) => {
            let slope = u - v;
            if slope.abs() < 1e-300 {
                if n * v >= target {
                    Some((0.0, n))
                } else {
                    None
                }
            } else if slope > 0.0 {
                let x = (target - n * v) / slope;
                if x <= n {
                    Some((x.max(0.0), n))
                } else {
                    None
                }
            } else {
                let x = (target - n * v) / slope;
                if x >= 0.0 {
                    Some((0.0, x.min(n)))
                } else {
                    None
                }
            }
        }
        // u = -inf: any positive weight on it sinks the combination
        (false, true) => {
            if n * v >= target {
                Some((0.0, 0.0))
            } else {
                None
            }
        }
        (true, false) => {
            if n * u >= target {
                Some((n, n))
            } else {
                None
            }
        }
        (false, false) => None,
    }
}

/// Feasible x-range of `x*u + (n-x)*v <= target` over `x` in `[0, n]`.
fn le_range(u: f64, v: f64, n: f64, target: f64, slack: f64) -> Option<(f64, f64)> {
    let target = target + slack;
    match (u.is_finite(), v.is_finite()) {
        (true, true) => {
            if target == f64::NEG_INFINITY {
                return None;
            }
            let slope = u - v;
            if slope.abs() < 1e-300 {
                if n * v <= target {
                    Some((0.0, n))
                } else {
                    None
                }
            } else if slope > 0.0 {
                let x = (target - n * v) / slope;
                if x >= 0.0 {
                    Some((0.0, x.min(n)))
                } else {
                    None
                }
            } else {
                let x = (target - n * v) / slope;
                if x <= n {
                    Some((x.max(0.0), n))
                } else {
                    None
                }
            }
        }
        // -inf coordinates make the combination -inf for any positive weight
        (false, true) => {
            if n * v <= target {
                Some((0.0, n))
            } else {
                Some((TOL.min(n), n))
            }
        }
        (true, false) => {
            if n * u <= target {
                Some((0.0, n))
            } else {
                Some((0.0, n - TOL.min(n)))
            }
        }
        (false, false) => Some((0.0, n)),
    }
}

fn intersect(a: Option<(f64, f64)>, b: Option<(f64, f64)>) -> Option<(f64, f64)> {
    let (a0, a1) = a?;
    let (b0, b1) = b?;
    let lo = a0.max(b0);
    let hi = a1.min(b1);
    (lo <= hi).then_some((lo, hi))
}

/// Rewrite a page as at most two distinct prices while keeping the bracket
/// probability at `1 - 2*eps`, where `1 - eps` is the original bracket
/// probability.
///
/// Returns `(low_price, high_price, low_count)`; the remaining
/// `n - low_count` items take the high price. Requires `eps < 1/2` for the
/// guarantee to be meaningful; feasibility then follows from a center-of-mass
/// argument over the points `(ln F(p + upper), ln Pr[v < p + lower])`.
pub fn two_price_reduction(
    prices: &[f64],
    bracket: &UtilityBracket,
    f: &FiniteDistribution,
) -> Result<(f64, f64, usize), Error> {
    assert!(!prices.is_empty(), "page must have at least one price");
    let n = prices.len();
    if prices.iter().all(|&p| p == prices[0]) {
        return Ok((prices[0], prices[0], n));
    }

    let ln_a: Vec<f64> = prices.iter().map(|&p| f.cdf(p + bracket.upper).ln()).collect();
    let ln_b: Vec<f64> = prices
        .iter()
        .map(|&p| f.cdf_strict(p + bracket.lower).ln())
        .collect();
    let ln_a_total: f64 = ln_a.iter().sum();
    let ln_b_total: f64 = ln_b.iter().sum();
    let epsilon = 1.0
        - (ln_a_total.exp() - ln_b_total.exp()).max(0.0);

    // ordered pairs (low, high) by price; first feasible pair wins
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| prices[i].partial_cmp(&prices[j]).unwrap());
    let nf = n as f64;
    let slack = 1e-12 * nf.max(1.0);
    for (pos1, &i1) in order.iter().enumerate() {
        for &i2 in &order[pos1..] {
            let a_range = ge_range(ln_a[i1], ln_a[i2], nf, ln_a_total, slack);
            let b_range = le_range(ln_b[i1], ln_b[i2], nf, ln_b_total, slack);
            if let Some((lo, hi)) = intersect(a_range, b_range) {
                let x = canon(0.5 * (lo + hi)).clamp(0.0, nf);
                let low_count = (canon(x).ceil() as usize).min(n);
                return Ok((prices[i1], prices[i2], low_count));
            }
        }
    }
    Err(Error::NoFeasiblePair { epsilon })
}

/// Median thresholds for a chain of independent finite distributions given
/// as `(value, prob)` atom lists. Returns `n + 2` thresholds: a leading 0, a
/// lowest median per distribution clamped to be nondecreasing, and a trailing
/// infinity.
pub fn median_thresholds(dists: &[Vec<(f64, f64)>]) -> Vec<f64> {
    let mut out = Vec::with_capacity(dists.len() + 2);
    out.push(0.0);
    for atoms in dists {
        let mut sorted = atoms.clone();
        sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut cum = 0.0;
        let mut median = sorted.last().map(|a| a.0).unwrap_or(0.0);
        for &(v, p) in &sorted {
            cum += p;
            if cum >= 0.5 - 1e-12 {
                median = v;
                break;
            }
        }
        let prev = *out.last().unwrap();
        out.push(median.max(prev));
    }
    out.push(f64::INFINITY);
    out
}

/// The utility grid `{0, step, 2*step, ...}` capped at the top of the
/// support.
pub(crate) fn utility_grid(f: &FiniteDistribution, step: f64) -> Vec<f64> {
    debug_assert!(step > 0.0);
    let max = f.max_value();
    let mut grid = Vec::new();
    let mut i = 0u64;
    loop {
        let g = canon(i as f64 * step);
        if g > max + TOL {
            break;
        }
        grid.push(g);
        i += 1;
    }
    grid
}

/// Bait price candidates `{v - g : v in supp, g in grid}` clipped to
/// nonnegative, deduplicated, ascending.
fn bait_candidates(f: &FiniteDistribution, grid: &[f64]) -> Vec<f64> {
    let mut seen: BTreeMap<i64, f64> = BTreeMap::new();
    for &v in f.support() {
        for &g in grid {
            let p = canon(v - g);
            if p >= -TOL {
                seen.insert(util_key(p.max(0.0)), p.max(0.0));
            }
        }
    }
    seen.into_values().collect()
}

#[derive(Debug, Clone, Copy)]
struct PageChoice {
    low_price: f64,
    high_price: f64,
    low_count: usize,
    high_count: usize,
    prob: f64,
}

impl PageChoice {
    fn price_mass(&self) -> f64 {
        self.low_price * self.low_count as f64 + self.high_price * self.high_count as f64
    }
}

/// Best two-price page of `size` bait items whose utility lands in
/// `[lower, upper]` with maximum probability. Candidates are deduplicated by
/// their CDF signature at the bracket edges (the probability only depends on
/// those), keeping the highest price per signature.
fn best_two_price_page(
    cands: &[f64],
    lower: f64,
    upper: f64,
    size: usize,
    f: &FiniteDistribution,
) -> Option<PageChoice> {
    let mut by_sig: BTreeMap<(i64, i64), (f64, f64, f64)> = BTreeMap::new();
    for &p in cands {
        let a = f.cdf(p + upper);
        if a <= 0.0 {
            continue;
        }
        let b = f.cdf_strict(p + lower);
        by_sig.insert((util_key(a), util_key(b)), (p, a, b));
    }
    let sigs: Vec<(f64, f64, f64)> = by_sig.into_values().collect();

    let mut best: Option<PageChoice> = None;
    let mut consider = |choice: PageChoice| {
        if choice.prob <= 0.0 {
            return;
        }
        match &best {
            Some(b) if choice.prob <= b.prob + 1e-12 => {
                if (choice.prob - b.prob).abs() <= 1e-12 && choice.price_mass() > b.price_mass() + 1e-12 {
                    best = Some(choice);
                }
            }
            _ => best = Some(choice),
        }
    };

    for (i, &(p1, a1, b1)) in sigs.iter().enumerate() {
        // single price
        let prob = a1.powi(size as i32) - b1.powi(size as i32);
        consider(PageChoice {
            low_price: p1,
            high_price: p1,
            low_count: size,
            high_count: 0,
            prob,
        });
        for &(p2, a2, b2) in &sigs[i + 1..] {
            for low in 1..size {
                let high = size - low;
                let prob = a1.powi(low as i32) * a2.powi(high as i32)
                    - b1.powi(low as i32) * b2.powi(high as i32);
                let (lo_p, hi_p, lo_c, hi_c) = if p1 <= p2 {
                    (p1, p2, low, high)
                } else {
                    (p2, p1, high, low)
                };
                consider(PageChoice {
                    low_price: lo_p,
                    high_price: hi_p,
                    low_count: lo_c,
                    high_count: hi_c,
                    prob,
                });
            }
        }
    }
    best
}

#[derive(Debug, Clone, Copy)]
struct DpCell {
    prob: f64,
    page_prob: f64,
    parent_upper: usize,
    parent_slots: usize,
    choice: PageChoice,
}

/// Schedule bait pages by dynamic programming over `(utility upper bound,
/// accumulated free slots)`.
///
/// Stage `t` cells hold the best probability that the bait items carry the
/// buyer through `t` pages with the page-`t` utility inside a bracket whose
/// upper end is the grid value; the lower end is pinned to the previous
/// upper end plus the search cost. Cells falling below the acceptance
/// threshold are pruned (success probabilities only shrink). One skeleton is
/// returned per reachable page count, taking the maximal slot count, then
/// the best probability, then the lowest utility bound.
pub fn synthesize_bait_dp(f: &FiniteDistribution, params: &SynthesisParams) -> Vec<BaitSkeleton> {
    assert!(params.k >= 1, "page capacity must be positive");
    assert!(params.grid_step > 0.0, "grid step must be positive");
    let grid = utility_grid(f, params.grid_step);
    let cands = bait_candidates(f, &grid);
    let accept = params.dp_accept;

    let mut page_memo: BTreeMap<(usize, usize, usize), Option<PageChoice>> = BTreeMap::new();
    let mut stages: Vec<BTreeMap<(usize, usize), DpCell>> = Vec::new();

    // virtual stage 0: u(0) = 0, no slots
    let mut frontier: BTreeMap<(usize, usize), DpCell> = BTreeMap::new();
    frontier.insert(
        (0, 0),
        DpCell {
            prob: 1.0,
            page_prob: 1.0,
            parent_upper: 0,
            parent_slots: 0,
            choice: PageChoice {
                low_price: 0.0,
                high_price: 0.0,
                low_count: 0,
                high_count: 0,
                prob: 1.0,
            },
        },
    );

    for t in 1..=grid.len() + 1 {
        if let Supply::Finite(m) = params.supply {
            if (t * params.k) as u64 > m {
                break;
            }
        }
        let mut next: BTreeMap<(usize, usize), DpCell> = BTreeMap::new();
        for (&(prev_upper, slots), prev_cell) in &frontier {
            let lower = canon(grid[prev_upper] + params.delta);
            for (upper_idx, &upper) in grid.iter().enumerate() {
                if upper + TOL < lower {
                    continue;
                }
                for size in 1..=params.k {
                    let choice = *page_memo
                        .entry((prev_upper, upper_idx, size))
                        .or_insert_with(|| best_two_price_page(&cands, lower, upper, size, f));
                    let Some(choice) = choice else { continue };
                    let prob = prev_cell.prob * choice.prob;
                    if prob + TOL < accept {
                        continue;
                    }
                    let key = (upper_idx, slots + (params.k - size));
                    let cell = DpCell {
                        prob,
                        page_prob: choice.prob,
                        parent_upper: prev_upper,
                        parent_slots: slots,
                        choice,
                    };
                    match next.get_mut(&key) {
                        Some(existing) => {
                            let better = prob > existing.prob + 1e-12
                                || ((prob - existing.prob).abs() <= 1e-12
                                    && choice.price_mass() > existing.choice.price_mass() + 1e-12);
                            if better {
                                *existing = cell;
                            }
                        }
                        None => {
                            next.insert(key, cell);
                        }
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        stages.push(next.clone());
        frontier = next;
        let _ = t;
    }

    // One skeleton per page count: maximal slots, then best probability,
    // then lowest utility bound.
    let mut skeletons = Vec::new();
    for (ti, stage) in stages.iter().enumerate() {
        let mut pick: Option<((usize, usize), DpCell)> = None;
        for (&(upper_idx, slots), &cell) in stage {
            let better = match &pick {
                None => true,
                Some(((p_upper, p_slots), p_cell)) => {
                    slots > *p_slots
                        || (slots == *p_slots
                            && (cell.prob > p_cell.prob + 1e-12
                                || ((cell.prob - p_cell.prob).abs() <= 1e-12
                                    && upper_idx < *p_upper)))
                }
            };
            if better {
                pick = Some(((upper_idx, slots), cell));
            }
        }
        let Some(((mut upper_idx, mut slots), _)) = pick else { continue };

        let mut pages = Vec::with_capacity(ti + 1);
        let mut total_prob = 1.0;
        for back in (0..=ti).rev() {
            let cell = stages[back][&(upper_idx, slots)];
            let lower = canon(grid[cell.parent_upper] + params.delta);
            pages.push(BaitPage {
                low_price: cell.choice.low_price,
                high_price: cell.choice.high_price,
                low_count: cell.choice.low_count,
                high_count: cell.choice.high_count,
                free_slots: params.k - cell.choice.low_count - cell.choice.high_count,
                bracket: UtilityBracket {
                    lower,
                    upper: grid[upper_idx],
                },
                bracket_prob: cell.page_prob,
            });
            total_prob *= cell.page_prob;
            upper_idx = cell.parent_upper;
            slots = cell.parent_slots;
        }
        pages.reverse();
        let free_slots = pages.iter().map(|p| p.free_slots).sum();
        skeletons.push(BaitSkeleton {
            pages,
            success_probability: total_prob,
            free_slots,
        });
    }
    skeletons
}

/// Assemble a mechanism from a skeleton plus per-page expensive prices and an
/// optional appended all-expensive page, trimming items to the supply.
fn assemble(
    skel: &BaitSkeleton,
    params: &SynthesisParams,
    fill_prices: &[Option<f64>],
    appended: Option<f64>,
) -> Mechanism {
    let mut pages: Vec<MenuPage> = Vec::with_capacity(skel.pages.len() + 1);
    for (t, bait) in skel.pages.iter().enumerate() {
        let mut page = bait.menu_page();
        if let Some(price) = fill_prices.get(t).copied().flatten() {
            for _ in 0..bait.free_slots {
                page.prices.push(price);
                page.labels.as_mut().unwrap().push(Label::Expensive);
            }
        }
        pages.push(page);
    }
    if let Some(price) = appended {
        pages.push(MenuPage::labeled(
            vec![price; params.k],
            vec![Label::Expensive; params.k],
        ));
    }
    // trim to supply: drop the appended page first, then fills from the back
    if let Supply::Finite(m) = params.supply {
        let mut total: usize = pages.iter().map(MenuPage::len).sum();
        if total > m as usize && appended.is_some() {
            total -= pages.pop().map(|p| p.len()).unwrap_or(0);
        }
        let mut idx = pages.len();
        while total > m as usize && idx > 0 {
            idx -= 1;
            let bait_items = skel.pages.get(idx).map(|b| b.size()).unwrap_or(0);
            while total > m as usize && pages[idx].len() > bait_items {
                pages[idx].prices.pop();
                pages[idx].labels.as_mut().unwrap().pop();
                total -= 1;
            }
        }
    }
    Mechanism::new(params.k, params.delta, params.supply, pages)
}

/// Expected-share condition for an expensive price `p` backed by `ell`
/// items against the next page's bracket-conditioned utility law: when the
/// expensive items interfere, the buyer must still take one with probability
/// at least 1/2.
fn conditional_sale_holds(
    p: f64,
    ell: usize,
    law: &[(f64, f64)],
    delta: f64,
    f: &FiniteDistribution,
) -> bool {
    if law.is_empty() || ell == 0 {
        return true;
    }
    let mut hit = 0.0;
    let mut near = 0.0;
    for &(u, mass) in law {
        hit += mass * (1.0 - f.cdf_strict(p + u).powi(ell as i32));
        near += mass * (1.0 - f.cdf_strict(p - delta + u).powi(ell as i32));
    }
    hit + TOL >= 0.5 * near
}

/// Candidate mechanisms for one skeleton: a bait-only variant, uniform
/// expensive fills over a grid-derived price set (plus the proof-derived
/// `p* - upper(T)` price), and one variant with per-page prices from
/// `[p*/3, p*/2]` passing the conditional-sale test.
pub fn attach_expensive(
    skel: &BaitSkeleton,
    f: &FiniteDistribution,
    params: &SynthesisParams,
) -> Vec<Mechanism> {
    let t_pages = skel.pages.len();
    let mut out = Vec::new();

    // bait-only fallback; also the right answer when no price is positive
    out.push(assemble(skel, params, &vec![None; t_pages], None));

    let capacity = skel.free_slots + params.k;
    let (p_star, _) = optimal_uniform_price((capacity / 2).max(1), f);
    let upper_last = skel.pages.last().map(|p| p.bracket.upper).unwrap_or(0.0);

    // uniform candidates
    let grid = utility_grid(f, params.grid_step);
    let mut price_set: BTreeMap<i64, f64> = BTreeMap::new();
    for &v in f.support() {
        for &g in &grid {
            let p = canon(v - g - params.margin);
            if p > TOL {
                price_set.insert(util_key(p), p);
            }
        }
    }
    let proof_price = canon(p_star - upper_last);
    if proof_price > TOL {
        price_set.insert(util_key(proof_price), proof_price);
    }
    for &p in price_set.values() {
        out.push(assemble(skel, params, &vec![Some(p); t_pages], Some(p)));
    }

    // per-page conditional prices in [p*/3, p*/2]
    if p_star > TOL {
        let laws: Vec<Vec<(f64, f64)>> = skel.pages.iter().map(|p| p.bracket_law(f)).collect();
        let mut fills: Vec<Option<f64>> = Vec::with_capacity(t_pages);
        for t in 0..t_pages {
            if skel.pages[t].free_slots == 0 {
                fills.push(None);
                continue;
            }
            let price = if t + 1 < t_pages {
                let mut chosen = p_star / 2.0;
                let mut i = 0u32;
                loop {
                    let cand = canon(p_star / 2.0 - i as f64 * params.delta);
                    let cand = if cand < p_star / 3.0 { p_star / 3.0 } else { cand };
                    if conditional_sale_holds(
                        cand,
                        skel.pages[t].free_slots,
                        &laws[t + 1],
                        params.delta,
                        f,
                    ) {
                        chosen = cand;
                        break;
                    }
                    if cand <= p_star / 3.0 + TOL {
                        break;
                    }
                    i += 1;
                }
                chosen
            } else {
                p_star / 2.0
            };
            fills.push(Some(price));
        }
        out.push(assemble(skel, params, &fills, Some(p_star / 2.0)));
    }

    out
}

/// A scored member of the candidate pool.
#[derive(Debug, Clone)]
pub struct ScoredCandidate {
    pub id: String,
    pub mechanism: Mechanism,
    pub report: RevenueReport,
}

/// Everything a synthesis run produced: the winner plus the whole scored
/// pool, sorted by revenue.
#[derive(Debug, Clone)]
pub struct SynthesisOutcome {
    pub best: ScoredCandidate,
    pub candidates: Vec<ScoredCandidate>,
}

fn staircase(
    params: &SynthesisParams,
    low_value: f64,
    high_value: f64,
    t_pages: usize,
    append: bool,
) -> Option<Mechanism> {
    let mut pages = Vec::with_capacity(t_pages + 1);
    for t in 1..=t_pages {
        let bait = canon(low_value - t as f64 * params.delta);
        if bait < -TOL {
            return None;
        }
        let mut prices = vec![bait.max(0.0)];
        let mut labels = vec![Label::Bait];
        let expensive = canon(high_value - (t + 1) as f64 * params.delta - params.margin);
        if expensive > TOL && params.k > 1 {
            prices.resize(params.k, expensive);
            labels.resize(params.k, Label::Expensive);
        }
        pages.push(MenuPage { prices, labels: Some(labels) });
    }
    if append {
        let price = canon(high_value - (t_pages + 2) as f64 * params.delta - params.margin);
        if price > TOL {
            pages.push(MenuPage::labeled(
                vec![price; params.k],
                vec![Label::Expensive; params.k],
            ));
        } else {
            return None;
        }
    }
    let mech = Mechanism::new(params.k, params.delta, params.supply, pages);
    params.supply.allows(mech.total_items()).then_some(mech)
}

const STAIRCASE_PAGE_CAP: usize = 64;

/// Build the candidate pool, score every member exactly, and return the
/// best mechanism. Ties resolve to fewer pages, then lower total price mass.
pub fn synthesize(f: &FiniteDistribution, params: &SynthesisParams) -> SynthesisOutcome {
    assert!(params.k >= 1, "page capacity must be positive");
    assert!(params.grid_step > 0.0, "grid step must be positive");
    let mut pool: Vec<(String, Mechanism)> = Vec::new();

    // single-page uniform menu
    let page_size = match params.supply {
        Supply::Finite(m) => params.k.min(m as usize),
        Supply::Unbounded => params.k,
    };
    if page_size > 0 {
        let (price, _) = optimal_uniform_price(page_size, f);
        pool.push((
            "uniform_page".into(),
            Mechanism::new(
                params.k,
                params.delta,
                params.supply,
                vec![MenuPage::labeled(
                    vec![price; page_size],
                    vec![Label::Expensive; page_size],
                )],
            ),
        ));
    }

    // DP skeletons with expensive items attached
    for skel in synthesize_bait_dp(f, params) {
        for (ci, mech) in attach_expensive(&skel, f, params).into_iter().enumerate() {
            pool.push((format!("dp{}_v{}", skel.pages.len(), ci), mech));
        }
    }

    // staircase family
    for (li, &low_value) in f.support().iter().enumerate() {
        for &high_value in &f.support()[li..] {
            let t_cap = ((low_value / params.delta + TOL).floor() as usize).min(STAIRCASE_PAGE_CAP);
            for t_pages in 1..=t_cap {
                for append in [false, true] {
                    if let Some(mech) = staircase(params, low_value, high_value, t_pages, append) {
                        let id = format!(
                            "stair{}_lo{}_hi{}{}",
                            t_pages,
                            low_value,
                            high_value,
                            if append { "_x" } else { "" }
                        );
                        pool.push((id, mech));
                    }
                }
            }
        }
    }

    // zero supply sells nothing; keep the pool nonempty anyway
    if pool.is_empty() {
        pool.push((
            "empty".into(),
            Mechanism::new(params.k, params.delta, params.supply, vec![]),
        ));
    }

    // deduplicate structurally identical candidates, then score
    let mut seen: BTreeMap<String, ()> = BTreeMap::new();
    let mut candidates: Vec<ScoredCandidate> = Vec::new();
    for (id, mech) in pool {
        if !validate(&mech, f).is_empty() {
            continue;
        }
        let fingerprint = serde_json::to_string(&mech).expect("mechanism serializes");
        if seen.insert(fingerprint, ()).is_some() {
            continue;
        }
        let report = exact_revenue(&mech, f);
        candidates.push(ScoredCandidate {
            id,
            mechanism: mech,
            report,
        });
    }

    let best = candidates
        .iter()
        .max_by(|a, b| {
            let ra = a.report.expected_revenue;
            let rb = b.report.expected_revenue;
            if (ra - rb).abs() > TOL {
                return ra.partial_cmp(&rb).unwrap();
            }
            // prefer fewer pages, then lower price mass: invert for max_by
            let pa = a.mechanism.pages.len();
            let pb = b.mechanism.pages.len();
            if pa != pb {
                return pb.cmp(&pa);
            }
            b.mechanism
                .total_price_mass()
                .partial_cmp(&a.mechanism.total_price_mass())
                .unwrap()
        })
        .expect("pool always contains the single-page candidate")
        .clone();

    candidates.sort_by(|a, b| {
        b.report
            .expected_revenue
            .partial_cmp(&a.report.expected_revenue)
            .unwrap()
            .then_with(|| a.id.cmp(&b.id))
    });

    SynthesisOutcome { best, candidates }
}
