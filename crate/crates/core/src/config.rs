//! JSON description of a learning problem: dimension, distribution and target.
//!
//! ```json
//! {"n": 8,
//!  "probs": [0.75, 0.75, 0.75, 0.75, 0.75, 0.75, 0.75, 0.75],
//!  "target": {"type": "parity", "support": [0, 1, 2]}}
//! ```
//!
//! `probs` may instead be `{"base": [...], "alpha": a, "c": c, "seed": s}`
//! for a smoothed distribution, and `target` may be
//! `{"type": "junta", "support": [...], "table": [0, 1, ...]}` or
//! `{"type": "random_junta", "support": [...]}`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distributions::{random_junta, smoothed_distribution, SmoothingSpec};
use crate::error::{Error, Result};
use crate::product::ProductDistribution;
use crate::rng::{derive_seed, stream, stream_rng};
use crate::target::TargetFunction;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProbsSpec {
    Fixed(Vec<f64>),
    Smoothed {
        base: Vec<f64>,
        alpha: f64,
        c: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
}

impl ProbsSpec {
    pub fn len(&self) -> usize {
        match self {
            ProbsSpec::Fixed(p) => p.len(),
            ProbsSpec::Smoothed { base, .. } => base.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn smoothing(&self) -> Option<Result<SmoothingSpec>> {
        match self {
            ProbsSpec::Fixed(_) => None,
            ProbsSpec::Smoothed { base, alpha, c, .. } => Some(SmoothingSpec::new(*alpha, *c, base.clone())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TargetSpec {
    Parity { support: Vec<usize> },
    #[serde(alias = "explicit")]
    Junta { support: Vec<usize>, table: Vec<u8> },
    #[serde(alias = "random-junta")]
    RandomJunta { support: Vec<usize> },
}

impl TargetSpec {
    pub fn support(&self) -> &[usize] {
        match self {
            TargetSpec::Parity { support }
            | TargetSpec::Junta { support, .. }
            | TargetSpec::RandomJunta { support } => support,
        }
    }

    /// Builds the target; random juntas draw their table from `rng`.
    pub fn build<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<TargetFunction> {
        match self {
            TargetSpec::Parity { support } => TargetFunction::parity(n, support.clone()),
            TargetSpec::Junta { support, table } => {
                let table = table
                    .iter()
                    .map(|&b| match b {
                        0 => Ok(false),
                        1 => Ok(true),
                        other => Err(Error::InvalidParameter(format!("table entry {other} is not 0 or 1"))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                TargetFunction::new(n, support.clone(), table)
            }
            TargetSpec::RandomJunta { support } => random_junta(n, support.clone(), rng),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub n: usize,
    pub probs: ProbsSpec,
    pub target: TargetSpec,
}

impl ProblemSpec {
    pub fn from_json(s: &str) -> Result<Self> {
        let spec: ProblemSpec =
            serde_json::from_str(s).map_err(|e| Error::InvalidParameter(format!("problem spec: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.probs.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: self.probs.len(),
            });
        }
        match &self.probs {
            ProbsSpec::Fixed(p) => {
                ProductDistribution::new(p.clone())?;
            }
            ProbsSpec::Smoothed { .. } => {
                self.probs.smoothing().expect("smoothed")?;
            }
        }
        if let Some(&bad) = self.target.support().iter().find(|&&i| i >= self.n) {
            return Err(Error::IndexOutOfRange { index: bad, n: self.n });
        }
        Ok(())
    }

    /// The distribution, drawing the smoothing noise from the smoothing block's own seed
    /// if it has one and from `seed` otherwise.
    pub fn distribution(&self, seed: u64) -> Result<ProductDistribution> {
        match &self.probs {
            ProbsSpec::Fixed(p) => ProductDistribution::new(p.clone()),
            ProbsSpec::Smoothed { seed: own, .. } => {
                let spec = self.probs.smoothing().expect("smoothed")?;
                smoothed_distribution(&spec, own.unwrap_or(derive_seed(seed, stream::SMOOTHING)))
            }
        }
    }

    pub fn target(&self, seed: u64) -> Result<TargetFunction> {
        self.target.build(self.n, &mut stream_rng(seed, stream::TARGET))
    }

    pub fn resolve(&self, seed: u64) -> Result<(ProductDistribution, TargetFunction)> {
        Ok((self.distribution(seed)?, self.target(seed)?))
    }
}
