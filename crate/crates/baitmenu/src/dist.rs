//! Finite value distributions: the i.i.d. prior over item values.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::num::TOL;
use crate::Error;

/// Probability sums must match 1 this tightly at construction.
const PROB_SUM_TOL: f64 = 1e-12;

/// A distribution with finite support on the nonnegative reals.
///
/// Support points are strictly ascending and every atom carries positive
/// mass. CDF queries use the crate-wide 1e-9 tolerance band so that a query
/// at `p + u` lands on the intended side of a support point even when the
/// sum carries float noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDistribution", into = "RawDistribution")]
pub struct FiniteDistribution {
    support: Vec<f64>,
    probs: Vec<f64>,
    /// cum[i] = probs[0] + .. + probs[i-1]; cum[len] ~= 1.
    cum: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawDistribution {
    support: Vec<f64>,
    probs: Vec<f64>,
}

impl TryFrom<RawDistribution> for FiniteDistribution {
    type Error = Error;

    fn try_from(raw: RawDistribution) -> Result<Self, Error> {
        FiniteDistribution::new(raw.support, raw.probs)
    }
}

impl From<FiniteDistribution> for RawDistribution {
    fn from(f: FiniteDistribution) -> Self {
        RawDistribution {
            support: f.support,
            probs: f.probs,
        }
    }
}

impl FiniteDistribution {
    pub fn new(support: Vec<f64>, probs: Vec<f64>) -> Result<Self, Error> {
        if support.is_empty() {
            return Err(Error::InvalidDistribution("support is empty".into()));
        }
        if support.len() != probs.len() {
            return Err(Error::InvalidDistribution(format!(
                "support has {} points but probs has {}",
                support.len(),
                probs.len()
            )));
        }
        for (i, &v) in support.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "support[{i}] = {v} is not a finite nonnegative value"
                )));
            }
            if i > 0 && v <= support[i - 1] {
                return Err(Error::InvalidDistribution(format!(
                    "support must be strictly ascending; support[{i}] = {v} <= support[{}] = {}",
                    i - 1,
                    support[i - 1]
                )));
            }
        }
        let mut sum = 0.0;
        for (i, &p) in probs.iter().enumerate() {
            if !p.is_finite() || p <= 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "probs[{i}] = {p} is not a finite positive probability"
                )));
            }
            sum += p;
        }
        if (sum - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::InvalidDistribution(format!(
                "probs sum to {sum}, expected 1 within {PROB_SUM_TOL}"
            )));
        }
        let mut cum = Vec::with_capacity(probs.len() + 1);
        let mut acc = 0.0;
        cum.push(0.0);
        for &p in &probs {
            acc += p;
            cum.push(acc);
        }
        Ok(FiniteDistribution { support, probs, cum })
    }

    /// Point mass at a single value.
    pub fn point_mass(value: f64) -> Result<Self, Error> {
        Self::new(vec![value], vec![1.0])
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn min_value(&self) -> f64 {
        self.support[0]
    }

    pub fn max_value(&self) -> f64 {
        *self.support.last().unwrap()
    }

    /// Atoms as `(value, prob)` pairs.
    pub fn atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.support.iter().copied().zip(self.probs.iter().copied())
    }

    /// `Pr[v <= x]`, treating values within `TOL` of `x` as included.
    pub fn cdf(&self, x: f64) -> f64 {
        if x == f64::INFINITY {
            return 1.0;
        }
        let idx = self.support.partition_point(|&v| v <= x + TOL);
        self.cum[idx]
    }

    /// `Pr[v < x]`, treating values within `TOL` of `x` as excluded.
    pub fn cdf_strict(&self, x: f64) -> f64 {
        if x == f64::NEG_INFINITY {
            return 0.0;
        }
        let idx = self.support.partition_point(|&v| v < x - TOL);
        self.cum[idx]
    }

    /// `Pr[v >= x]`; a value exactly at `x` counts as a sale.
    pub fn survival(&self, x: f64) -> f64 {
        (1.0 - self.cdf_strict(x)).max(0.0)
    }

    /// Draw one value.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.gen::<f64>() * self.cum[self.cum.len() - 1];
        let idx = self.cum[1..].partition_point(|&c| c <= u);
        self.support[idx.min(self.support.len() - 1)]
    }
}
