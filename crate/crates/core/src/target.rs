//! Junta target functions `f(x) = f̃(x_J)`.

use crate::bits::{get_bit, BitVec};
use crate::error::{Error, Result};

/// Largest junta support that exact enumeration accepts.
pub const ENUMERATION_LIMIT: usize = 25;

/// A `k`-junta on `n` bits: a strictly increasing support `J` and a truth
/// table of length `2^k`. Table index bit `t` holds the value of coordinate
/// `support[t]` (lowest support index is the least significant bit).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TargetFunction {
    n: usize,
    support: Vec<usize>,
    table: Vec<bool>,
}

impl TargetFunction {
    pub fn new(n: usize, support: Vec<usize>, table: Vec<bool>) -> Result<Self> {
        if support.len() > ENUMERATION_LIMIT {
            return Err(Error::EnumerationLimit {
                k: support.len(),
                limit: ENUMERATION_LIMIT,
            });
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSupport(format!(
                "support {support:?} is not strictly increasing"
            )));
        }
        if let Some(&bad) = support.iter().find(|&&i| i >= n) {
            return Err(Error::IndexOutOfRange { index: bad, n });
        }
        let expected = 1usize << support.len();
        if table.len() != expected {
            return Err(Error::TableLength {
                expected,
                found: table.len(),
            });
        }
        Ok(TargetFunction { n, support, table })
    }

    /// The `k`-parity `χ_J`: 1 iff an odd number of the bits in `J` are set.
    pub fn parity(n: usize, support: Vec<usize>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::InvalidSupport("parity needs a nonempty support".into()));
        }
        let k = support.len();
        if k > ENUMERATION_LIMIT {
            return Err(Error::EnumerationLimit {
                k,
                limit: ENUMERATION_LIMIT,
            });
        }
        let table = (0..1usize << k).map(|b| b.count_ones() % 2 == 1).collect();
        TargetFunction::new(n, support, table)
    }

    pub fn constant(n: usize, value: bool) -> Self {
        TargetFunction {
            n,
            support: Vec::new(),
            table: vec![value],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.support.len()
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn table(&self) -> &[bool] {
        &self.table
    }

    pub fn in_support(&self, i: usize) -> bool {
        self.support.binary_search(&i).is_ok()
    }

    /// Position of coordinate `i` within the support.
    pub fn support_position(&self, i: usize) -> Option<usize> {
        self.support.binary_search(&i).ok()
    }

    pub fn is_constant(&self) -> bool {
        self.table.iter().all(|&b| b == self.table[0])
    }

    #[inline]
    pub fn pattern_of_words(&self, words: &[u64]) -> usize {
        self.support
            .iter()
            .enumerate()
            .fold(0, |acc, (t, &i)| acc | (usize::from(get_bit(words, i)) << t))
    }

    #[inline]
    pub(crate) fn eval_words(&self, words: &[u64]) -> bool {
        self.table[self.pattern_of_words(words)]
    }

    /// `f(x)`.
    pub fn evaluate(&self, bits: &BitVec) -> Result<bool> {
        if bits.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: bits.len(),
            });
        }
        Ok(self.eval_words(bits.words()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> BitVec {
        BitVec::parse(s).unwrap()
    }

    #[test]
    fn parity_on_first_two() {
        let f = TargetFunction::parity(5, vec![0, 1]).unwrap();
        assert!(f.evaluate(&bits("10000")).unwrap());
        assert!(!f.evaluate(&bits("11000")).unwrap());
        assert!(!f.evaluate(&bits("00111")).unwrap());
    }

    #[test]
    fn parity_tables() {
        let p1 = TargetFunction::parity(3, vec![0]).unwrap();
        assert!(p1.table()[0b1]);
        let p2 = TargetFunction::parity(3, vec![0, 1]).unwrap();
        assert!(!p2.table()[0b11]);
        let p3 = TargetFunction::parity(3, vec![0, 1, 2]).unwrap();
        assert!(p3.table()[0b111]);
    }

    #[test]
    fn constant_zero() {
        let f = TargetFunction::new(3, vec![0, 2], vec![false; 4]).unwrap();
        for s in ["000", "101", "111", "010"] {
            assert!(!f.evaluate(&bits(s)).unwrap());
        }
        assert!(f.is_constant());
    }

    #[test]
    fn and_table() {
        let f = TargetFunction::new(4, vec![0, 1], vec![false, false, false, true]).unwrap();
        assert!(f.evaluate(&bits("1100")).unwrap());
        assert!(!f.evaluate(&bits("0100")).unwrap());
    }

    #[test]
    fn lowest_support_index_is_least_significant() {
        // Table true only at index 0b01: support[0] = 1 set, support[1] = 3 clear.
        let f = TargetFunction::new(4, vec![1, 3], vec![false, true, false, false]).unwrap();
        assert!(f.evaluate(&bits("0100")).unwrap());
        assert!(!f.evaluate(&bits("0001")).unwrap());
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(
            TargetFunction::parity(3, vec![0, 3]),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            TargetFunction::parity(3, vec![]),
            Err(Error::InvalidSupport(_))
        ));
        assert!(matches!(
            TargetFunction::new(3, vec![1, 0], vec![false; 4]),
            Err(Error::InvalidSupport(_))
        ));
        assert!(matches!(
            TargetFunction::new(3, vec![0], vec![false; 4]),
            Err(Error::TableLength { .. })
        ));
        assert!(matches!(
            TargetFunction::parity(40, (0..26).collect()),
            Err(Error::EnumerationLimit { .. })
        ));
        let f = TargetFunction::parity(3, vec![0]).unwrap();
        assert!(f.evaluate(&bits("01")).is_err());
    }
}
