//! Menus, mechanisms, valuation profiles, and their validation.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dist::FiniteDistribution;
use crate::num::TOL;

/// Role of an item inside a bait mechanism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Bait,
    Expensive,
}

/// Rank used to break full ties (equal utility, equal price): an expensive
/// item wins over a bait item wins over an unlabeled one.
pub(crate) fn label_rank(label: Option<Label>) -> u8 {
    match label {
        None => 0,
        Some(Label::Bait) => 1,
        Some(Label::Expensive) => 2,
    }
}

/// Item supply: a hard count or unlimited.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Supply {
    Finite(u64),
    Unbounded,
}

impl Supply {
    pub fn allows(&self, items: usize) -> bool {
        match self {
            Supply::Finite(m) => items as u64 <= *m,
            Supply::Unbounded => true,
        }
    }
}

impl Serialize for Supply {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Supply::Finite(m) => s.serialize_u64(*m),
            Supply::Unbounded => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Supply {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Count(u64),
            Tag(String),
        }
        match Repr::deserialize(d)? {
            Repr::Count(m) => Ok(Supply::Finite(m)),
            Repr::Tag(t) if t == "inf" => Ok(Supply::Unbounded),
            Repr::Tag(t) => Err(serde::de::Error::custom(format!(
                "supply must be a count or \"inf\", got \"{t}\""
            ))),
        }
    }
}

/// One menu page: a multiset of prices, optionally tagged bait/expensive.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MenuPage {
    pub prices: Vec<f64>,
    pub labels: Option<Vec<Label>>,
}

impl MenuPage {
    pub fn new(prices: Vec<f64>) -> Self {
        MenuPage { prices, labels: None }
    }

    pub fn labeled(prices: Vec<f64>, labels: Vec<Label>) -> Self {
        MenuPage {
            prices,
            labels: Some(labels),
        }
    }

    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }

    /// Label of the i-th price, if the page is tagged.
    pub fn label(&self, i: usize) -> Option<Label> {
        self.labels.as_ref().and_then(|l| l.get(i).copied())
    }
}

/// A paged posted-price mechanism.
///
/// `k` is the page capacity, `delta` the per-page search cost, `supply` the
/// total number of items available. The JSON form is
/// `{"k":…,"delta":…,"supply":…|"inf","pages":[[…],…],"labels":optional}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "MechanismRepr", into = "MechanismRepr")]
pub struct Mechanism {
    pub k: usize,
    pub delta: f64,
    pub supply: Supply,
    pub pages: Vec<MenuPage>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct MechanismRepr {
    k: usize,
    delta: f64,
    supply: Supply,
    pages: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<Option<Vec<Label>>>>,
}

impl From<MechanismRepr> for Mechanism {
    fn from(r: MechanismRepr) -> Self {
        let pages = r
            .pages
            .into_iter()
            .enumerate()
            .map(|(i, prices)| MenuPage {
                prices,
                labels: r.labels.as_ref().and_then(|ls| ls.get(i).cloned().flatten()),
            })
            .collect();
        Mechanism {
            k: r.k,
            delta: r.delta,
            supply: r.supply,
            pages,
        }
    }
}

impl From<Mechanism> for MechanismRepr {
    fn from(m: Mechanism) -> Self {
        let any_labels = m.pages.iter().any(|p| p.labels.is_some());
        MechanismRepr {
            k: m.k,
            delta: m.delta,
            supply: m.supply,
            labels: any_labels.then(|| m.pages.iter().map(|p| p.labels.clone()).collect()),
            pages: m.pages.into_iter().map(|p| p.prices).collect(),
        }
    }
}

impl Mechanism {
    pub fn new(k: usize, delta: f64, supply: Supply, pages: Vec<MenuPage>) -> Self {
        Mechanism {
            k,
            delta,
            supply,
            pages,
        }
    }

    /// Total number of items listed across all pages.
    pub fn total_items(&self) -> usize {
        self.pages.iter().map(MenuPage::len).sum()
    }

    /// True if any page carries bait/expensive tags.
    pub fn has_labels(&self) -> bool {
        self.pages.iter().any(|p| p.labels.is_some())
    }

    /// Sum of all listed prices; used as a tie-break between candidates.
    pub fn total_price_mass(&self) -> f64 {
        self.pages.iter().flat_map(|p| p.prices.iter()).sum()
    }
}

/// One i.i.d. value per offered item, aligned with page order then
/// within-page order.
#[derive(Debug, Clone, PartialEq)]
pub struct ValuationProfile(pub Vec<f64>);

impl ValuationProfile {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// What a single buyer trace produced.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PurchaseOutcome {
    /// 1-based page the buyer stopped on; at most `pages + 1` (the implicit
    /// empty page after the listed menu).
    pub stop_page: usize,
    pub bought_price: Option<f64>,
    /// Best utility attained if something was bought, otherwise 0.
    pub buyer_utility: f64,
    pub bought_label: Option<Label>,
}

/// A broken invariant, reported as data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl Violation {
    fn new(field: &str, message: String) -> Self {
        Violation {
            field: field.to_string(),
            message,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// Check every structural invariant of a mechanism against a distribution.
/// Returns an empty list iff all invariants hold.
pub fn validate(mech: &Mechanism, f: &FiniteDistribution) -> Vec<Violation> {
    let mut out = Vec::new();

    // Distribution invariants are enforced at construction; re-derive the
    // cheap ones so a violation report is self-contained.
    let prob_sum: f64 = f.probs().iter().sum();
    if (prob_sum - 1.0).abs() > 1e-12 {
        out.push(Violation::new(
            "distribution.probs",
            format!("probabilities sum to {prob_sum}, expected 1"),
        ));
    }
    if f.support().windows(2).any(|w| w[0] >= w[1]) {
        out.push(Violation::new(
            "distribution.support",
            "support is not strictly ascending".into(),
        ));
    }

    if !(mech.delta.is_finite() && mech.delta > 0.0) {
        out.push(Violation::new(
            "mechanism.delta",
            format!("search cost must be finite and positive, got {}", mech.delta),
        ));
    }
    for (t, page) in mech.pages.iter().enumerate() {
        if page.len() > mech.k {
            out.push(Violation::new(
                "mechanism.pages",
                format!(
                    "page {} lists {} prices, exceeding the page capacity k = {}",
                    t + 1,
                    page.len(),
                    mech.k
                ),
            ));
        }
        for (i, &p) in page.prices.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                out.push(Violation::new(
                    "mechanism.pages",
                    format!("page {} price {} = {p} is not finite and nonnegative", t + 1, i + 1),
                ));
            }
        }
        if let Some(labels) = &page.labels {
            if labels.len() != page.prices.len() {
                out.push(Violation::new(
                    "mechanism.labels",
                    format!(
                        "page {} has {} labels for {} prices",
                        t + 1,
                        labels.len(),
                        page.prices.len()
                    ),
                ));
            }
        }
    }
    let items = mech.total_items();
    if !mech.supply.allows(items) {
        out.push(Violation::new(
            "mechanism.supply",
            format!("{items} prices listed but supply is {:?}", mech.supply),
        ));
    }
    out
}

/// Draw a valuation profile for every item of the mechanism, deterministically
/// for a fixed seed.
pub fn sample_profile(mech: &Mechanism, f: &FiniteDistribution, seed: u64) -> ValuationProfile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = mech.total_items();
    let mut values = Vec::with_capacity(n);
    for _ in 0..n {
        values.push(f.sample(&mut rng));
    }
    ValuationProfile(values)
}

/// `true` when `a` and `b` agree up to the crate tolerance.
pub fn money_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOL
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_point() -> FiniteDistribution {
        FiniteDistribution::new(vec![10.0, 100.0], vec![0.9, 0.1]).unwrap()
    }

    /// The two-page uniform-price menu used as a running example.
    pub(crate) fn uniform_menu() -> Mechanism {
        Mechanism::new(
            2,
            1.0,
            Supply::Unbounded,
            vec![
                MenuPage::new(vec![9.0, 9.0]),
                MenuPage::new(vec![98.9, 98.9]),
            ],
        )
    }

    #[test]
    fn valid_mechanism_has_no_violations() {
        assert!(validate(&uniform_menu(), &two_point()).is_empty());
    }

    #[test]
    fn page_capacity_violation_names_the_page() {
        let mech = Mechanism::new(
            2,
            1.0,
            Supply::Unbounded,
            vec![MenuPage::new(vec![1.0, 2.0, 3.0])],
        );
        let violations = validate(&mech, &two_point());
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].field, "mechanism.pages");
        assert!(violations[0].message.contains("page 1"));
    }

    #[test]
    fn supply_violation_counts_items() {
        let mech = Mechanism::new(
            2,
            1.0,
            Supply::Finite(3),
            vec![MenuPage::new(vec![1.0, 2.0]), MenuPage::new(vec![3.0, 4.0])],
        );
        let violations = validate(&mech, &two_point());
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].field, "mechanism.supply");
    }

    #[test]
    fn profile_is_deterministic_per_seed() {
        let mech = uniform_menu();
        let f = two_point();
        let a = sample_profile(&mech, &f, 42);
        let b = sample_profile(&mech, &f, 42);
        assert_eq!(a, b);
        assert_eq!(a.len(), 4);
        assert!(a.values().iter().all(|v| *v == 10.0 || *v == 100.0));
    }

    #[test]
    fn point_mass_profiles_are_constant() {
        let mech = uniform_menu();
        let f = FiniteDistribution::point_mass(10.0).unwrap();
        let p = sample_profile(&mech, &f, 3);
        assert!(p.values().iter().all(|v| *v == 10.0));
    }

    #[test]
    fn empirical_frequency_matches_probs() {
        // 1000 seeds x 1000 items: marginal frequency of the rare value.
        let f = two_point();
        let mech = Mechanism::new(
            1000,
            1.0,
            Supply::Unbounded,
            vec![MenuPage::new(vec![0.0; 1000])],
        );
        let mut hits = 0usize;
        for seed in 0..1000 {
            hits += sample_profile(&mech, &f, seed)
                .values()
                .iter()
                .filter(|v| **v == 100.0)
                .count();
        }
        let freq = hits as f64 / 1e6;
        assert!((freq - 0.1).abs() < 0.001, "freq = {freq}");
    }

    #[test]
    fn mechanism_json_round_trip() {
        let mut mech = uniform_menu();
        mech.pages[1].labels = Some(vec![Label::Expensive, Label::Expensive]);
        let text = serde_json::to_string(&mech).unwrap();
        let back: Mechanism = serde_json::from_str(&text).unwrap();
        assert_eq!(mech, back);

        let unlabeled = uniform_menu();
        let text = serde_json::to_string(&unlabeled).unwrap();
        assert!(!text.contains("labels"));
        let back: Mechanism = serde_json::from_str(&text).unwrap();
        assert_eq!(unlabeled, back);
    }

    #[test]
    fn supply_json_accepts_count_or_inf() {
        let m: Mechanism =
            serde_json::from_str(r#"{"k":2,"delta":1.0,"supply":"inf","pages":[[9.0,9.0]]}"#)
                .unwrap();
        assert_eq!(m.supply, Supply::Unbounded);
        let m: Mechanism =
            serde_json::from_str(r#"{"k":2,"delta":1.0,"supply":7,"pages":[[9.0,9.0]]}"#).unwrap();
        assert_eq!(m.supply, Supply::Finite(7));
    }
}
