//! Binary decision trees over boolean features.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bits::{get_bit, BitVec};
use crate::error::{Error, Result};

/// A decision tree. Internal nodes test one feature and descend into `zero`
/// or `one`; leaves carry a label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecisionTree {
    Leaf(bool),
    Split {
        feature: usize,
        zero: Box<DecisionTree>,
        one: Box<DecisionTree>,
    },
}

impl DecisionTree {
    pub fn leaf(label: bool) -> Self {
        DecisionTree::Leaf(label)
    }

    pub fn split(feature: usize, zero: DecisionTree, one: DecisionTree) -> Self {
        DecisionTree::Split {
            feature,
            zero: Box::new(zero),
            one: Box::new(one),
        }
    }

    /// `T(x)`.
    pub fn evaluate(&self, bits: &BitVec) -> Result<bool> {
        if let Some(max) = self.max_feature() {
            if max >= bits.len() {
                return Err(Error::IndexOutOfRange {
                    index: max,
                    n: bits.len(),
                });
            }
        }
        Ok(self.evaluate_words(bits.words()))
    }

    #[inline]
    pub(crate) fn evaluate_words(&self, words: &[u64]) -> bool {
        let mut node = self;
        loop {
            match node {
                DecisionTree::Leaf(label) => return *label,
                DecisionTree::Split { feature, zero, one } => {
                    node = if get_bit(words, *feature) { one } else { zero };
                }
            }
        }
    }

    /// Evaluates and also returns the features consulted, in order.
    pub fn evaluate_traced(&self, bits: &BitVec) -> (bool, Vec<usize>) {
        let mut path = Vec::new();
        let mut node = self;
        loop {
            match node {
                DecisionTree::Leaf(label) => return (*label, path),
                DecisionTree::Split { feature, zero, one } => {
                    path.push(*feature);
                    node = if bits.get(*feature) { one } else { zero };
                }
            }
        }
    }

    /// Number of nodes, leaves included.
    pub fn size(&self) -> usize {
        match self {
            DecisionTree::Leaf(_) => 1,
            DecisionTree::Split { zero, one, .. } => 1 + zero.size() + one.size(),
        }
    }

    /// Number of edges on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        match self {
            DecisionTree::Leaf(_) => 0,
            DecisionTree::Split { zero, one, .. } => 1 + zero.depth().max(one.depth()),
        }
    }

    pub fn num_leaves(&self) -> usize {
        match self {
            DecisionTree::Leaf(_) => 1,
            DecisionTree::Split { zero, one, .. } => zero.num_leaves() + one.num_leaves(),
        }
    }

    /// Every feature used by some internal node.
    pub fn features(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.collect_features(&mut out);
        out
    }

    fn collect_features(&self, out: &mut BTreeSet<usize>) {
        if let DecisionTree::Split { feature, zero, one } = self {
            out.insert(*feature);
            zero.collect_features(out);
            one.collect_features(out);
        }
    }

    pub fn max_feature(&self) -> Option<usize> {
        self.features().iter().next_back().copied()
    }

    /// Checks that every feature is `< n` and no feature repeats along a path.
    pub fn validate(&self, n: usize) -> Result<()> {
        fn walk(t: &DecisionTree, n: usize, path: &mut Vec<usize>) -> Result<()> {
            if let DecisionTree::Split { feature, zero, one } = t {
                if *feature >= n {
                    return Err(Error::IndexOutOfRange { index: *feature, n });
                }
                if path.contains(feature) {
                    return Err(Error::InvalidParameter(format!(
                        "feature {feature} repeats on a root-to-leaf path"
                    )));
                }
                path.push(*feature);
                walk(zero, n, path)?;
                walk(one, n, path)?;
                path.pop();
            }
            Ok(())
        }
        walk(self, n, &mut Vec::new())
    }

    /// Indented text rendering, one node per line.
    pub fn to_text(&self) -> String {
        fn render(t: &DecisionTree, depth: usize, prefix: &str, out: &mut String) {
            let indent = "  ".repeat(depth);
            match t {
                DecisionTree::Leaf(label) => {
                    let _ = writeln!(out, "{indent}{prefix}leaf {}", u8::from(*label));
                }
                DecisionTree::Split { feature, zero, one } => {
                    let _ = writeln!(out, "{indent}{prefix}x{feature}");
                    render(zero, depth + 1, "0: ", out);
                    render(one, depth + 1, "1: ", out);
                }
            }
        }
        let mut out = String::new();
        render(self, 0, "", &mut out);
        out
    }
}

impl Serialize for DecisionTree {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            DecisionTree::Leaf(label) => {
                let mut st = s.serialize_struct("Leaf", 1)?;
                st.serialize_field("leaf", &u8::from(*label))?;
                st.end()
            }
            DecisionTree::Split { feature, zero, one } => {
                let mut st = s.serialize_struct("Split", 3)?;
                st.serialize_field("feature", feature)?;
                st.serialize_field("zero", zero)?;
                st.serialize_field("one", one)?;
                st.end()
            }
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum NodeRepr {
    Split {
        feature: usize,
        zero: Box<DecisionTree>,
        one: Box<DecisionTree>,
    },
    Leaf {
        leaf: u8,
    },
}

impl<'de> Deserialize<'de> for DecisionTree {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match NodeRepr::deserialize(d)? {
            NodeRepr::Leaf { leaf: 0 } => Ok(DecisionTree::Leaf(false)),
            NodeRepr::Leaf { leaf: 1 } => Ok(DecisionTree::Leaf(true)),
            NodeRepr::Leaf { leaf } => Err(serde::de::Error::custom(format!(
                "leaf label must be 0 or 1, got {leaf}"
            ))),
            NodeRepr::Split { feature, zero, one } => Ok(DecisionTree::Split { feature, zero, one }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> BitVec {
        BitVec::parse(s).unwrap()
    }

    fn dictator() -> DecisionTree {
        DecisionTree::split(0, DecisionTree::leaf(false), DecisionTree::leaf(true))
    }

    #[test]
    fn single_leaf() {
        let t = DecisionTree::leaf(true);
        for s in ["0", "1", "0110"] {
            assert!(t.evaluate(&bits(s)).unwrap());
        }
    }

    #[test]
    fn dictator_tree() {
        let t = dictator();
        assert!(!t.evaluate(&bits("01")).unwrap());
        assert!(t.evaluate(&bits("10")).unwrap());
        assert_eq!(t.size(), 3);
        assert_eq!(t.depth(), 1);
        assert_eq!(t.evaluate_traced(&bits("10")), (true, vec![0]));
    }

    #[test]
    fn full_parity_tree_reproduces_parity() {
        fn build(features: &[usize], acc: bool) -> DecisionTree {
            match features.split_first() {
                None => DecisionTree::leaf(acc),
                Some((&f, rest)) => DecisionTree::split(f, build(rest, acc), build(rest, !acc)),
            }
        }
        let k = 4;
        let t = build(&[0, 1, 2, 3], false);
        for pattern in 0..1u32 << k {
            let s: String = (0..k).map(|i| if pattern >> i & 1 == 1 { '1' } else { '0' }).collect();
            let expected = pattern.count_ones() % 2 == 1;
            assert_eq!(t.evaluate(&bits(&s)).unwrap(), expected, "pattern {s}");
        }
    }

    #[test]
    fn out_of_range_feature() {
        let t = DecisionTree::split(3, DecisionTree::leaf(false), DecisionTree::leaf(true));
        assert!(t.evaluate(&bits("01")).is_err());
        assert!(t.validate(3).is_err());
        assert!(t.validate(4).is_ok());
    }

    #[test]
    fn repeated_feature_rejected() {
        let t = DecisionTree::split(0, dictator(), DecisionTree::leaf(true));
        assert!(t.validate(2).is_err());
    }

    #[test]
    fn json_shape() {
        let t = DecisionTree::split(2, DecisionTree::leaf(false), dictator());
        let json = serde_json::to_string(&t).unwrap();
        assert_eq!(
            json,
            r#"{"feature":2,"zero":{"leaf":0},"one":{"feature":0,"zero":{"leaf":0},"one":{"leaf":1}}}"#
        );
        let back: DecisionTree = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);
        assert!(serde_json::from_str::<DecisionTree>(r#"{"leaf":2}"#).is_err());
    }

    #[test]
    fn text_rendering() {
        let t = DecisionTree::split(2, DecisionTree::leaf(false), dictator());
        assert_eq!(t.to_text(), "x2\n  0: leaf 0\n  1: x0\n    0: leaf 0\n    1: leaf 1\n");
    }
}
