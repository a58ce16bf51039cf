//! Partial assignments `w ∈ {0, 1, *}^n`, encoding a root-to-node path.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bits::BitVec;
use crate::error::{Error, Result};

/// A partial assignment of the `n` coordinates. Fixed coordinates carry a bit,
/// the rest are free.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartialAssignment {
    fixed: BitVec,
    values: BitVec,
}

impl PartialAssignment {
    /// The assignment with every coordinate free.
    pub fn free(n: usize) -> Self {
        PartialAssignment {
            fixed: BitVec::zeros(n),
            values: BitVec::zeros(n),
        }
    }

    pub fn from_values(values: &[Option<bool>]) -> Self {
        let mut w = PartialAssignment::free(values.len());
        for (i, v) in values.iter().enumerate() {
            if let Some(b) = *v {
                w.fixed.set(i, true);
                w.values.set(i, b);
            }
        }
        w
    }

    /// Parses a string over `{'0', '1', '*'}`.
    pub fn parse(s: &str) -> Result<Self> {
        let values = s
            .chars()
            .map(|c| match c {
                '0' => Ok(Some(false)),
                '1' => Ok(Some(true)),
                '*' => Ok(None),
                other => Err(Error::InvalidParameter(format!(
                    "invalid assignment character {other:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PartialAssignment::from_values(&values))
    }

    pub fn len(&self) -> usize {
        self.fixed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fixed.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        if self.fixed.get(i) {
            Some(self.values.get(i))
        } else {
            None
        }
    }

    pub fn is_free(&self, i: usize) -> bool {
        !self.fixed.get(i)
    }

    /// `supp(w)`: the fixed coordinates, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.fixed.get(i)).collect()
    }

    pub fn num_fixed(&self) -> usize {
        self.fixed.count_ones()
    }

    /// Returns a copy with coordinate `i` fixed to `value`. Fails if `i` is
    /// already fixed.
    pub fn with(&self, i: usize, value: bool) -> Result<Self> {
        if i >= self.len() {
            return Err(Error::IndexOutOfRange { index: i, n: self.len() });
        }
        if self.fixed.get(i) {
            return Err(Error::CoordinateFixed(i));
        }
        let mut out = self.clone();
        out.fixed.set(i, true);
        out.values.set(i, value);
        Ok(out)
    }

    /// Combines two assignments fixing disjoint coordinates.
    pub fn merge(&self, other: &PartialAssignment) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        let mut out = self.clone();
        for i in other.support() {
            out = out.with(i, other.values.get(i))?;
        }
        Ok(out)
    }

    /// Whether a packed row lies in the subcube `X_w`.
    #[inline]
    pub(crate) fn matches_words(&self, row: &[u64]) -> bool {
        self.fixed
            .words()
            .iter()
            .zip(self.values.words())
            .zip(row)
            .all(|((&f, &v), &x)| x & f == v)
    }

    pub fn matches(&self, bits: &BitVec) -> bool {
        bits.len() == self.len() && self.matches_words(bits.words())
    }
}

impl fmt::Display for PartialAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            let c = match self.get(i) {
                None => '*',
                Some(false) => '0',
                Some(true) => '1',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl Serialize for PartialAssignment {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PartialAssignment {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        PartialAssignment::parse(&s).map_err(serde::de::Error::custom)
    }
}
