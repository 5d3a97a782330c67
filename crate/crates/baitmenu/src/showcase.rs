//! The two reference menus used throughout the tests and the `example`
//! subcommand: a two-page uniform-price menu and a ten-page staircase menu,
//! both for the two-point prior on {10 (90%), 100 (10%)} with page size 2
//! and search cost 1.

use crate::dist::FiniteDistribution;
use crate::model::{Label, Mechanism, MenuPage, Supply};

/// The two-point prior: value 10 with probability 0.9, value 100 with 0.1.
pub fn two_point_prior() -> FiniteDistribution {
    FiniteDistribution::new(vec![10.0, 100.0], vec![0.9, 0.1]).unwrap()
}

/// Optimal uniform-price menu for the two-point prior: pages [9, 9] then
/// [98.9, 98.9]. Exact expected revenue 9 + 0.81 * 0.19 * 89.9 = 22.83561.
pub fn uniform_menu() -> Mechanism {
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

/// Ten-page staircase menu: page t lists a bait at 10 - t and an expensive
/// item at 97.9 - (t - 1). The bait utilities climb by exactly the search
/// cost while a liked expensive item overtakes the next bait by 0.1 and
/// triggers a stop one page later. Exact expected revenue 38.31329.
pub fn staircase_menu() -> Mechanism {
    let pages = (1..=10)
        .map(|t| {
            MenuPage::labeled(
                vec![10.0 - t as f64, 97.9 - (t as f64 - 1.0)],
                vec![Label::Bait, Label::Expensive],
            )
        })
        .collect();
    Mechanism::new(2, 1.0, Supply::Unbounded, pages)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate;

    #[test]
    fn reference_menus_are_valid() {
        let f = two_point_prior();
        assert!(validate(&uniform_menu(), &f).is_empty());
        assert!(validate(&staircase_menu(), &f).is_empty());
    }

    #[test]
    fn staircase_prices_step_down() {
        let m = staircase_menu();
        assert_eq!(m.pages.len(), 10);
        assert_eq!(m.pages[0].prices, vec![9.0, 97.9]);
        assert_eq!(m.pages[9].prices, vec![0.0, 88.9]);
    }
}
