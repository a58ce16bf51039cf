//! Empirical split statistics and the ID3 recursion.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::assignment::PartialAssignment;
use crate::bits::for_each_one;
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::impurity::Impurity;
use crate::oracle;
use crate::product::ProductDistribution;
use crate::target::{TargetFunction, ENUMERATION_LIMIT};
use crate::tree::DecisionTree;

/// How `argmax` picks among features of exactly equal gain.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreak {
    #[default]
    LowestIndex,
    /// Uniformly among the tied features, from a generator seeded per learn.
    SeededRandom,
}

impl FromStr for TieBreak {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lowest-index" | "lowest_index" => Ok(TieBreak::LowestIndex),
            "seeded-random" | "seeded_random" => Ok(TieBreak::SeededRandom),
            other => Err(Error::InvalidParameter(format!("unknown tie-break mode {other:?}"))),
        }
    }
}

impl fmt::Display for TieBreak {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TieBreak::LowestIndex => "lowest-index",
            TieBreak::SeededRandom => "seeded-random",
        })
    }
}

/// What to emit when a split leaves one child without examples.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EmptyBranch {
    /// A leaf with the parent sample's majority label, ties to 0.
    #[default]
    ParentMajority,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LearnerPolicy {
    #[serde(default)]
    pub tie_break: TieBreak,
    #[serde(default)]
    pub empty_branch: EmptyBranch,
    #[serde(default)]
    pub impurity: Impurity,
}

/// Integer counts behind `Gain(S, i)` and `I(S, i)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SplitCounts {
    pub total: u64,
    pub label_ones: u64,
    pub feature_ones: u64,
    pub both_ones: u64,
}

impl SplitCounts {
    pub fn add(&mut self, other: &SplitCounts) {
        self.total += other.total;
        self.label_ones += other.label_ones;
        self.feature_ones += other.feature_ones;
        self.both_ones += other.both_ones;
    }

    /// `Gain` from the counts; `0` when the feature is constant.
    pub fn gain(&self, impurity: Impurity) -> f64 {
        let SplitCounts {
            total,
            label_ones,
            feature_ones,
            both_ones,
        } = *self;
        if feature_ones == 0 || feature_ones == total {
            return 0.0;
        }
        let m = total as f64;
        let zeros = total - feature_ones;
        let c = |num: u64, den: u64| impurity.value(num as f64 / den as f64);
        c(label_ones, total)
            - (feature_ones as f64 / m) * c(both_ones, feature_ones)
            - (zeros as f64 / m) * c(label_ones - both_ones, zeros)
    }

    /// `E[y] E[x_i] - E[y x_i]`.
    pub fn i_stat(&self) -> f64 {
        let m = self.total as f64;
        (self.label_ones as f64 / m) * (self.feature_ones as f64 / m) - self.both_ones as f64 / m
    }

    /// `Pr[y=1 | x_i=1] - Pr[y=1 | x_i=0]`, when both sides are observed.
    pub fn conditional_difference(&self) -> Option<f64> {
        let zeros = self.total - self.feature_ones;
        if self.feature_ones == 0 || zeros == 0 {
            return None;
        }
        Some(
            self.both_ones as f64 / self.feature_ones as f64
                - (self.label_ones - self.both_ones) as f64 / zeros as f64,
        )
    }
}

fn check_feature(s: &Dataset, i: usize) -> Result<()> {
    if s.is_empty() {
        return Err(Error::EmptySample);
    }
    if i >= s.n() {
        return Err(Error::IndexOutOfRange { index: i, n: s.n() });
    }
    Ok(())
}

pub fn split_counts(s: &Dataset, i: usize) -> Result<SplitCounts> {
    check_feature(s, i)?;
    let mut c = SplitCounts {
        total: s.len() as u64,
        ..Default::default()
    };
    for ex in s.iter() {
        let x = ex.bit(i);
        c.label_ones += u64::from(ex.label);
        c.feature_ones += u64::from(x);
        c.both_ones += u64::from(x && ex.label);
    }
    Ok(c)
}

/// `Gain(S, i)`.
pub fn empirical_gain(s: &Dataset, i: usize, impurity: Impurity) -> Result<f64> {
    Ok(split_counts(s, i)?.gain(impurity))
}

/// `I(S, i) = E_S[y] E_S[x_i] - E_S[y x_i]`.
pub fn empirical_i(s: &Dataset, i: usize) -> Result<f64> {
    Ok(split_counts(s, i)?.i_stat())
}

/// Per-feature counts over a subset of rows, all features at once.
#[derive(Clone, Debug)]
pub(crate) struct NodeCounts {
    pub total: u64,
    pub label_ones: u64,
    pub feature_ones: Vec<u64>,
    pub both_ones: Vec<u64>,
}

impl NodeCounts {
    pub fn zeros(n: usize) -> Self {
        NodeCounts {
            total: 0,
            label_ones: 0,
            feature_ones: vec![0; n],
            both_ones: vec![0; n],
        }
    }

    pub fn add_row(&mut self, words: &[u64], label: bool) {
        self.total += 1;
        self.label_ones += u64::from(label);
        let (ones, both) = (&mut self.feature_ones, &mut self.both_ones);
        if label {
            for_each_one(words, |i| {
                ones[i] += 1;
                both[i] += 1;
            });
        } else {
            for_each_one(words, |i| ones[i] += 1);
        }
    }

    pub fn add(&mut self, other: &NodeCounts) {
        self.total += other.total;
        self.label_ones += other.label_ones;
        for (a, b) in self.feature_ones.iter_mut().zip(&other.feature_ones) {
            *a += b;
        }
        for (a, b) in self.both_ones.iter_mut().zip(&other.both_ones) {
            *a += b;
        }
    }

    pub fn feature(&self, i: usize) -> SplitCounts {
        SplitCounts {
            total: self.total,
            label_ones: self.label_ones,
            feature_ones: self.feature_ones[i],
            both_ones: self.both_ones[i],
        }
    }
}

fn majority(label_ones: u64, total: u64) -> bool {
    2 * label_ones > total
}

/// Picks the argmax of `gains` (aligned with `features`) under the tie-break.
fn choose(features: &[usize], gains: &[f64], tie_break: TieBreak, rng: &mut ChaCha8Rng) -> usize {
    let best = gains.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tied: Vec<usize> = features
        .iter()
        .zip(gains)
        .filter(|(_, &g)| g == best)
        .map(|(&f, _)| f)
        .collect();
    match tie_break {
        TieBreak::LowestIndex => tied[0],
        TieBreak::SeededRandom => tied[rng.gen_range(0..tied.len())],
    }
}

fn normalize_features(n: usize, features: &[usize]) -> Result<Vec<usize>> {
    let mut a = features.to_vec();
    a.sort_unstable();
    a.dedup();
    if let Some(&bad) = a.iter().find(|&&i| i >= n) {
        return Err(Error::IndexOutOfRange { index: bad, n });
    }
    Ok(a)
}

/// Runs ID3 on `s` with candidate features `features`.
///
/// A pure sample becomes a leaf. Otherwise the feature of maximal gain is
/// split on and both children recurse without it. A child with no examples,
/// or an impure sample with no features left, becomes a majority leaf.
pub fn id3_learn(s: &Dataset, features: &[usize], policy: &LearnerPolicy, seed: u64) -> Result<DecisionTree> {
    if s.is_empty() {
        return Err(Error::EmptySample);
    }
    let available = normalize_features(s.n(), features)?;
    let rows: Vec<u32> = (0..s.len() as u32).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(grow(s, &rows, &available, policy, &mut rng))
}

fn grow(s: &Dataset, rows: &[u32], available: &[usize], policy: &LearnerPolicy, rng: &mut ChaCha8Rng) -> DecisionTree {
    let mut counts = NodeCounts::zeros(s.n());
    for &r in rows {
        let ex = s.get(r as usize);
        counts.add_row(ex.words(), ex.label);
    }
    if counts.label_ones == 0 || counts.label_ones == counts.total {
        return DecisionTree::leaf(counts.label_ones > 0);
    }
    let fallback = majority(counts.label_ones, counts.total);
    if available.is_empty() {
        return DecisionTree::leaf(fallback);
    }

    let gains: Vec<f64> = available
        .iter()
        .map(|&i| counts.feature(i).gain(policy.impurity))
        .collect();
    let j = choose(available, &gains, policy.tie_break, rng);
    let rest: Vec<usize> = available.iter().copied().filter(|&i| i != j).collect();

    let (one_rows, zero_rows): (Vec<u32>, Vec<u32>) =
        rows.iter().partition(|&&r| s.get(r as usize).bit(j));
    let mut child = |rows: &[u32]| match policy.empty_branch {
        EmptyBranch::ParentMajority if rows.is_empty() => DecisionTree::leaf(fallback),
        _ => grow(s, rows, &rest, policy, rng),
    };
    let one = child(&one_rows);
    let zero = child(&zero_rows);
    DecisionTree::split(j, zero, one)
}

/// ID3 driven by exact population gains `Gain(D_w, i)` instead of sampled
/// ones. Ties go to the lowest index.
pub fn id3_population(
    d: &ProductDistribution,
    f: &TargetFunction,
    features: &[usize],
    impurity: Impurity,
) -> Result<DecisionTree> {
    if f.k() > ENUMERATION_LIMIT {
        return Err(Error::EnumerationLimit {
            k: f.k(),
            limit: ENUMERATION_LIMIT,
        });
    }
    let available = normalize_features(f.n(), features)?;
    grow_population(d, f, PartialAssignment::free(f.n()), &available, impurity)
}

fn grow_population(
    d: &ProductDistribution,
    f: &TargetFunction,
    w: PartialAssignment,
    available: &[usize],
    impurity: Impurity,
) -> Result<DecisionTree> {
    let q = oracle::exact_label_prob(d, f, &w)?;
    if oracle::is_pure(d, f, &w)? {
        return Ok(DecisionTree::leaf(q > 0.5));
    }
    let fallback = q > 0.5;
    if available.is_empty() {
        return Ok(DecisionTree::leaf(fallback));
    }
    let gains = available
        .iter()
        .map(|&i| oracle::exact_gain(d, f, &w, i, impurity))
        .collect::<Result<Vec<f64>>>()?;
    // The tie-break is deterministic, so the generator is never consulted.
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let j = choose(available, &gains, TieBreak::LowestIndex, &mut rng);
    let rest: Vec<usize> = available.iter().copied().filter(|&i| i != j).collect();
    let child = |value: bool| -> Result<DecisionTree> {
        if d.prob_of(j, value) <= 0.0 {
            return Ok(DecisionTree::leaf(fallback));
        }
        grow_population(d, f, w.with(j, value)?, &rest, impurity)
    };
    let one = child(true)?;
    let zero = child(false)?;
    Ok(DecisionTree::split(j, zero, one))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BitVec;
    use crate::dataset::Example;
    use proptest::prelude::*;

    fn dataset(n: usize, rows: &[(&str, bool, usize)]) -> Dataset {
        let mut ds = Dataset::new(n).unwrap();
        for &(bits, label, copies) in rows {
            for _ in 0..copies {
                ds.push(&Example::new(BitVec::parse(bits).unwrap(), label)).unwrap();
            }
        }
        ds
    }

    /// Exact weighted expansion of the 2-parity under p = (0.75, 0.75).
    fn weighted_parity() -> Dataset {
        dataset(2, &[("11", false, 9), ("10", true, 3), ("01", true, 3), ("00", false, 1)])
    }

    #[test]
    fn gain_of_uniform_parity_is_zero() {
        let s = dataset(2, &[("00", false, 1), ("01", true, 1), ("10", true, 1), ("11", false, 1)]);
        assert_eq!(empirical_gain(&s, 0, Impurity::Gini).unwrap(), 0.0);
        assert_eq!(empirical_gain(&s, 1, Impurity::Gini).unwrap(), 0.0);
    }

    #[test]
    fn gain_with_constant_labels() {
        let s = dataset(3, &[("010", true, 2), ("111", true, 1), ("000", true, 3)]);
        for i in 0..3 {
            for c in Impurity::ALL {
                assert_eq!(empirical_gain(&s, i, c).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn gain_of_weighted_parity() {
        let s = weighted_parity();
        // C(0.375) - 0.75 C(0.25) - 0.25 C(0.75) under gini.
        assert_eq!(empirical_gain(&s, 0, Impurity::Gini).unwrap(), 0.046875);
    }

    #[test]
    fn i_values() {
        let s = dataset(1, &[("1", true, 1), ("0", false, 1)]);
        assert_eq!(empirical_i(&s, 0).unwrap(), -0.25);
        let constant = dataset(2, &[("10", true, 1), ("11", false, 2)]);
        assert_eq!(empirical_i(&constant, 0).unwrap(), 0.0);
        // E[y] E[x0] - E[y x0] = 0.375 * 0.75 - 0.1875.
        assert_eq!(empirical_i(&weighted_parity(), 0).unwrap(), 0.09375);
    }

    #[test]
    fn empty_sample_errors() {
        let s = Dataset::new(2).unwrap();
        assert_eq!(empirical_gain(&s, 0, Impurity::Gini), Err(Error::EmptySample));
        assert_eq!(empirical_i(&s, 0), Err(Error::EmptySample));
        assert_eq!(
            id3_learn(&s, &[0, 1], &LearnerPolicy::default(), 0),
            Err(Error::EmptySample)
        );
    }

    #[test]
    fn conditional_difference_sign() {
        let c = split_counts(&weighted_parity(), 0).unwrap();
        // Pr[y|x0=1] - Pr[y|x0=0] = 0.25 - 0.75, while I / (p(1-p)) = +0.5.
        assert_eq!(c.conditional_difference(), Some(-0.5));
        assert_eq!(c.i_stat() / (0.75 * 0.25), 0.5);
    }

    #[test]
    fn pure_sample_gives_leaf() {
        let s = dataset(3, &[("010", true, 2), ("111", true, 1)]);
        let t = id3_learn(&s, &[0, 1, 2], &LearnerPolicy::default(), 0).unwrap();
        assert_eq!(t, DecisionTree::leaf(true));
    }

    #[test]
    fn dictator_learned_at_depth_one() {
        let s = dataset(2, &[("00", false, 1), ("01", false, 1), ("10", true, 1), ("11", true, 1)]);
        assert!(empirical_gain(&s, 0, Impurity::Gini).unwrap() > empirical_gain(&s, 1, Impurity::Gini).unwrap());
        let t = id3_learn(&s, &[0, 1], &LearnerPolicy::default(), 0).unwrap();
        assert_eq!(t, DecisionTree::split(0, DecisionTree::leaf(false), DecisionTree::leaf(true)));
    }

    #[test]
    fn weighted_parity_with_irrelevant_features() {
        // Features 2 and 3 are uniform and independent of everything else:
        // each weighted row is expanded over all four of their patterns.
        let mut rows = Vec::new();
        for (head, label, copies) in [("11", false, 9), ("10", true, 3), ("01", true, 3), ("00", false, 1)] {
            for tail in ["00", "01", "10", "11"] {
                rows.push((format!("{head}{tail}"), label, copies));
            }
        }
        let rows: Vec<(&str, bool, usize)> = rows.iter().map(|(s, l, c)| (s.as_str(), *l, *c)).collect();
        let s = dataset(4, &rows);
        let t = id3_learn(&s, &[0, 1, 2, 3], &LearnerPolicy::default(), 0).unwrap();
        assert_eq!(t.features().into_iter().collect::<Vec<_>>(), vec![0, 1]);
        let d = ProductDistribution::new(vec![0.75, 0.75, 0.5, 0.5]).unwrap();
        let f = TargetFunction::parity(4, vec![0, 1]).unwrap();
        assert_eq!(oracle::exact_tree_loss(&d, &f, &t).unwrap(), 0.0);
    }

    #[test]
    fn empty_branch_gets_parent_majority() {
        // Feature 0 is constant; labels conflict, so the split has an empty side.
        let s = dataset(1, &[("1", true, 2), ("1", false, 1)]);
        let t = id3_learn(&s, &[0], &LearnerPolicy::default(), 0).unwrap();
        assert_eq!(t, DecisionTree::split(0, DecisionTree::leaf(true), DecisionTree::leaf(true)));
        // Exhausted features with an impure sample: majority, ties to 0.
        let tie = dataset(1, &[("1", true, 1), ("1", false, 1)]);
        let t = id3_learn(&tie, &[], &LearnerPolicy::default(), 0).unwrap();
        assert_eq!(t, DecisionTree::leaf(false));
    }

    #[test]
    fn feature_index_validation() {
        let s = dataset(2, &[("10", true, 1), ("00", false, 1)]);
        assert!(id3_learn(&s, &[0, 2], &LearnerPolicy::default(), 0).is_err());
    }

    #[test]
    fn seeded_random_tie_break_is_reproducible() {
        let s = dataset(
            4,
            &[("0000", false, 1), ("0101", true, 1), ("1010", true, 1), ("1111", false, 1)],
        );
        let policy = LearnerPolicy {
            tie_break: TieBreak::SeededRandom,
            ..Default::default()
        };
        let a = id3_learn(&s, &[0, 1, 2, 3], &policy, 7).unwrap();
        let b = id3_learn(&s, &[0, 1, 2, 3], &policy, 7).unwrap();
        assert_eq!(a, b);
        let roots: std::collections::BTreeSet<usize> = (0..64)
            .map(|seed| match id3_learn(&s, &[0, 1, 2, 3], &policy, seed).unwrap() {
                DecisionTree::Split { feature, .. } => feature,
                DecisionTree::Leaf(_) => unreachable!(),
            })
            .collect();
        assert!(roots.len() > 1, "random tie-break always picked {roots:?}");
    }

    #[test]
    fn population_learner() {
        let u = ProductDistribution::uniform(4);
        let f = TargetFunction::parity(4, vec![1, 3]).unwrap();
        let free = PartialAssignment::free(4);
        for i in 0..4 {
            assert_eq!(oracle::exact_gain(&u, &f, &free, i, Impurity::Gini).unwrap(), 0.0);
        }

        let d = ProductDistribution::new(vec![0.75, 0.75, 0.6, 0.3]).unwrap();
        let f = TargetFunction::parity(4, vec![0, 1]).unwrap();
        let t = id3_population(&d, &f, &[0, 1, 2, 3], Impurity::Gini).unwrap();
        match &t {
            DecisionTree::Split { feature, .. } => assert!(*feature < 2),
            DecisionTree::Leaf(_) => panic!("expected a split"),
        }
        assert_eq!(oracle::exact_tree_loss(&d, &f, &t).unwrap(), 0.0);

        let c = TargetFunction::constant(4, true);
        assert_eq!(
            id3_population(&d, &c, &[0, 1, 2, 3], Impurity::Gini).unwrap(),
            DecisionTree::leaf(true)
        );
    }

    fn arb_dataset() -> impl Strategy<Value = Dataset> {
        (1usize..6).prop_flat_map(|n| {
            prop::collection::vec((prop::collection::vec(any::<bool>(), n), any::<bool>()), 1..40)
                .prop_map(move |rows| {
                    let mut ds = Dataset::new(n).unwrap();
                    for (bits, label) in rows {
                        ds.push(&Example::new(BitVec::from_bools(&bits), label)).unwrap();
                    }
                    ds
                })
        })
    }

    proptest! {
        #[test]
        fn gain_is_nonnegative(s in arb_dataset()) {
            for i in 0..s.n() {
                for c in Impurity::ALL {
                    prop_assert!(empirical_gain(&s, i, c).unwrap() >= -1e-12);
                }
            }
        }

        #[test]
        fn gain_sandwich(s in arb_dataset()) {
            let k = Impurity::Gini.constants();
            for i in 0..s.n() {
                let counts = split_counts(&s, i).unwrap();
                let (gain, i_stat) = (counts.gain(Impurity::Gini), counts.i_stat());
                prop_assert!(k.beta / 2.0 * i_stat * i_stat <= gain + 1e-12);
                prop_assert!(gain <= 2.0 * k.gamma * i_stat.abs() + 1e-12);
                if counts.feature_ones > 0 && counts.feature_ones < counts.total {
                    let p = counts.feature_ones as f64 / counts.total as f64;
                    prop_assert!(k.beta / 2.0 * i_stat * i_stat / (p * (1.0 - p)) <= gain + 1e-12);
                    let diff = counts.conditional_difference().unwrap();
                    prop_assert!((diff + i_stat / (p * (1.0 - p))).abs() < 1e-12);
                }
            }
        }

        #[test]
        fn learned_trees_are_valid_and_deterministic(s in arb_dataset(), random in any::<bool>(), seed in any::<u64>()) {
            let policy = LearnerPolicy {
                tie_break: if random { TieBreak::SeededRandom } else { TieBreak::LowestIndex },
                ..Default::default()
            };
            let features: Vec<usize> = (0..s.n()).step_by(1).collect();
            let t = id3_learn(&s, &features, &policy, seed).unwrap();
            prop_assert!(t.validate(s.n()).is_ok());
            prop_assert_eq!(&t, &id3_learn(&s, &features, &policy, seed).unwrap());

            let subset: Vec<usize> = (0..s.n()).filter(|i| i % 2 == 0).collect();
            let t = id3_learn(&s, &subset, &policy, seed).unwrap();
            prop_assert!(t.features().iter().all(|f| subset.contains(f)));
        }

        #[test]
        fn evaluation_only_reads_the_path(s in arb_dataset(), probe in prop::collection::vec(any::<bool>(), 6)) {
            let t = id3_learn(&s, &(0..s.n()).collect::<Vec<_>>(), &LearnerPolicy::default(), 0).unwrap();
            let x = BitVec::from_bools(&probe[..s.n()]);
            let (label, path) = t.evaluate_traced(&x);
            for i in (0..s.n()).filter(|i| !path.contains(i)) {
                let mut y = x.clone();
                y.flip(i);
                prop_assert_eq!(t.evaluate(&y).unwrap(), label);
            }
        }
    }
}
