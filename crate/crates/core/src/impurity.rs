//! Impurity functions `C: [0,1] → ℝ` with `C(0) = C(1) = 0` and `C(q) = C(1-q)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Impurity {
    /// `q(1-q)`.
    #[default]
    Gini,
    /// Binary entropy in bits.
    Entropy,
}

/// Strong-concavity constant `beta` and Lipschitz constant `gamma` of an
/// impurity function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ImpurityConstants {
    pub beta: f64,
    pub gamma: f64,
    /// False when `gamma` only holds away from the endpoints.
    pub gamma_global: bool,
}

impl Impurity {
    pub const ALL: [Impurity; 2] = [Impurity::Gini, Impurity::Entropy];

    pub fn evaluate(self, q: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::ProbabilityOutOfRange(q));
        }
        Ok(self.value(q))
    }

    /// Unchecked evaluation for callers that already hold a probability.
    #[inline]
    pub(crate) fn value(self, q: f64) -> f64 {
        // Evaluate on the lower half so that C(q) and C(1 - q) agree bit for bit
        // whenever 1 - q is representable.
        let q = if q > 0.5 { 1.0 - q } else { q };
        match self {
            Impurity::Gini => q * (1.0 - q),
            Impurity::Entropy => {
                let h = |t: f64| if t <= 0.0 { 0.0 } else { -t * t.log2() };
                h(q) + h(1.0 - q)
            }
        }
    }

    pub fn constants(self) -> ImpurityConstants {
        match self {
            Impurity::Gini => ImpurityConstants {
                beta: 2.0,
                gamma: 1.0,
                gamma_global: true,
            },
            // -C''(q) = 1 / (q (1-q) ln 2) is minimised at q = 1/2. C' is
            // unbounded at the endpoints.
            Impurity::Entropy => ImpurityConstants {
                beta: 4.0 / std::f64::consts::LN_2,
                gamma: f64::INFINITY,
                gamma_global: false,
            },
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Impurity::Gini => "gini",
            Impurity::Entropy => "entropy",
        }
    }
}

impl fmt::Display for Impurity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Impurity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gini" => Ok(Impurity::Gini),
            "entropy" => Ok(Impurity::Entropy),
            other => Err(Error::InvalidParameter(format!("unknown impurity {other:?}"))),
        }
    }
}
