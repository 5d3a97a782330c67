//! Float conventions shared across the crate.
//!
//! Money and probabilities are `f64`. All equality-flavored comparisons use
//! the absolute tolerance [`TOL`], and utilities that enter hash keys are
//! first snapped to the 1e-9 grid so that mathematically equal states merge
//! instead of fragmenting into float-noise twins. Negative infinity is the
//! sentinel utility of an empty page and is never arithmetic-combined.

/// Absolute tolerance for money/utility comparisons.
pub const TOL: f64 = 1e-9;

const GRID: f64 = 1e9;

/// Snap a utility to the 1e-9 grid. Passes non-finite values through.
pub fn canon(x: f64) -> f64 {
    if x.is_finite() {
        (x * GRID).round() / GRID
    } else {
        x
    }
}

/// `a >= b` up to [`TOL`].
pub fn approx_ge(a: f64, b: f64) -> bool {
    a >= b - TOL
}

/// `a == b` up to [`TOL`]. Two negative infinities compare equal.
pub fn approx_eq(a: f64, b: f64) -> bool {
    if a == f64::NEG_INFINITY || b == f64::NEG_INFINITY {
        return a == b;
    }
    (a - b).abs() <= TOL
}

/// Integer key of a grid-snapped utility; `i64::MIN` encodes negative infinity.
pub(crate) fn util_key(x: f64) -> i64 {
    if x == f64::NEG_INFINITY {
        i64::MIN
    } else {
        debug_assert!(x.is_finite());
        (x * GRID).round() as i64
    }
}

/// Key for an optional price; prices are nonnegative so -1 is free for "none".
pub(crate) fn price_key(p: Option<f64>) -> i64 {
    match p {
        Some(p) => util_key(p),
        None => -1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canon_is_stable_on_representable_values() {
        assert_eq!(canon(1.0), 1.0);
        assert_eq!(canon(0.30000000000000004), 0.3);
        assert_eq!(canon(f64::NEG_INFINITY), f64::NEG_INFINITY);
    }

    #[test]
    fn keys_distinguish_neg_infinity() {
        assert_ne!(util_key(f64::NEG_INFINITY), util_key(-1e5));
        assert_eq!(util_key(1.0 + 4e-10), util_key(1.0));
    }
}
