use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `∏ Bernoulli(p_i)` over `{0,1}^n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ProductDistribution {
    probs: Vec<f64>,
}

impl ProductDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidParameter("distribution needs n >= 1".into()));
        }
        if let Some(&bad) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::ProbabilityOutOfRange(bad));
        }
        Ok(ProductDistribution { probs })
    }

    /// Every coordinate with the same parameter `p`.
    pub fn constant(n: usize, p: f64) -> Result<Self> {
        ProductDistribution::new(vec![p; n])
    }

    pub fn uniform(n: usize) -> Self {
        ProductDistribution {
            probs: vec![0.5; n.max(1)],
        }
    }

    pub fn n(&self) -> usize {
        self.probs.len()
    }

    #[inline]
    pub fn p(&self, i: usize) -> f64 {
        self.probs[i]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Probability that coordinate `i` takes `value`.
    #[inline]
    pub fn prob_of(&self, i: usize, value: bool) -> f64 {
        if value {
            self.probs[i]
        } else {
            1.0 - self.probs[i]
        }
    }
}

impl TryFrom<Vec<f64>> for ProductDistribution {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        ProductDistribution::new(v)
    }
}

impl From<ProductDistribution> for Vec<f64> {
    fn from(d: ProductDistribution) -> Self {
        d.probs
    }
}
