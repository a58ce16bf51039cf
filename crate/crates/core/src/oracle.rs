//! Exact distributional quantities for junta targets, computed by enumerating
//! the `2^k` assignments of the junta support.
//!
//! Coordinates outside the support are independent of the label, so every
//! conditional quantity under `D_w` only needs the free support coordinates;
//! fixed coordinates outside the support only enter through `Pr(X_w)`.

use serde::{Serialize, Serializer};

use crate::assignment::PartialAssignment;
use crate::error::{Error, Result};
use crate::impurity::Impurity;
use crate::product::ProductDistribution;
use crate::target::{TargetFunction, ENUMERATION_LIMIT};
use crate::tree::DecisionTree;

/// Probability mass of one support pattern under `D_w`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubcubeWeight {
    /// Truth-table index of the support assignment.
    pub pattern: usize,
    pub weight: f64,
}

/// The conditional law of the support bits under `D_w`.
#[derive(Clone, Debug)]
pub struct Subcube {
    /// `Pr_{x∼D}(x ∈ X_w)`.
    pub mass: f64,
    /// Weights over the patterns consistent with `w`; they sum to 1.
    pub weights: Vec<SubcubeWeight>,
}

fn check_inputs(d: &ProductDistribution, f: &TargetFunction, w: &PartialAssignment) -> Result<()> {
    if f.k() > ENUMERATION_LIMIT {
        return Err(Error::EnumerationLimit {
            k: f.k(),
            limit: ENUMERATION_LIMIT,
        });
    }
    if d.n() != f.n() {
        return Err(Error::DimensionMismatch {
            expected: f.n(),
            found: d.n(),
        });
    }
    if w.len() != f.n() {
        return Err(Error::DimensionMismatch {
            expected: f.n(),
            found: w.len(),
        });
    }
    Ok(())
}

/// Pattern weights of the support under `D_w` and the mass `Pr(X_w)`.
pub fn subcube(d: &ProductDistribution, f: &TargetFunction, w: &PartialAssignment) -> Result<Subcube> {
    check_inputs(d, f, w)?;
    let mass = w
        .support()
        .into_iter()
        .map(|i| d.prob_of(i, w.get(i).expect("support coordinate is fixed")))
        .product::<f64>();

    let mut base = 0usize;
    let mut free = Vec::new();
    for (t, &i) in f.support().iter().enumerate() {
        match w.get(i) {
            Some(true) => base |= 1 << t,
            Some(false) => {}
            None => free.push((t, d.p(i))),
        }
    }
    let mut weights = Vec::with_capacity(1 << free.len());
    weights.push(SubcubeWeight {
        pattern: base,
        weight: 1.0,
    });
    for (t, p) in free {
        let len = weights.len();
        for idx in 0..len {
            let sw = weights[idx];
            weights[idx].weight = sw.weight * (1.0 - p);
            weights.push(SubcubeWeight {
                pattern: sw.pattern | 1 << t,
                weight: sw.weight * p,
            });
        }
    }
    Ok(Subcube { mass, weights })
}

fn reachable_subcube(d: &ProductDistribution, f: &TargetFunction, w: &PartialAssignment) -> Result<Subcube> {
    let cube = subcube(d, f, w)?;
    if cube.mass <= 0.0 {
        return Err(Error::ZeroMassRestriction);
    }
    Ok(cube)
}

/// Masses of the label classes `(Pr(y = 0), Pr(y = 1))` under `D_w`.
fn label_masses(f: &TargetFunction, cube: &Subcube) -> (f64, f64) {
    let table = f.table();
    cube.weights.iter().fold((0.0, 0.0), |(m0, m1), sw| {
        if table[sw.pattern] {
            (m0, m1 + sw.weight)
        } else {
            (m0 + sw.weight, m1)
        }
    })
}

/// `Pr_{D_w}(y = 1)`.
pub fn exact_label_prob(d: &ProductDistribution, f: &TargetFunction, w: &PartialAssignment) -> Result<f64> {
    let cube = reachable_subcube(d, f, w)?;
    Ok(label_masses(f, &cube).1)
}

/// Whether every example of `D_w` carries the same label. Errors when
/// `Pr(X_w) = 0`.
pub fn is_pure(d: &ProductDistribution, f: &TargetFunction, w: &PartialAssignment) -> Result<bool> {
    let cube = reachable_subcube(d, f, w)?;
    let (m0, m1) = label_masses(f, &cube);
    Ok(m0 == 0.0 || m1 == 0.0)
}

fn check_feature(f: &TargetFunction, w: &PartialAssignment, i: usize) -> Result<()> {
    if i >= f.n() {
        return Err(Error::IndexOutOfRange { index: i, n: f.n() });
    }
    if !w.is_free(i) {
        return Err(Error::CoordinateFixed(i));
    }
    Ok(())
}

/// Joint masses `(Pr(x_i=0), Pr(x_i=0, y=1), Pr(x_i=1), Pr(x_i=1, y=1))`.
fn split_masses(f: &TargetFunction, cube: &Subcube, t: usize) -> [f64; 4] {
    let table = f.table();
    let mut acc = [0.0; 4];
    for sw in &cube.weights {
        let side = if sw.pattern >> t & 1 == 1 { 2 } else { 0 };
        acc[side] += sw.weight;
        if table[sw.pattern] {
            acc[side + 1] += sw.weight;
        }
    }
    acc
}

/// `I(D_w, i) = E[y] E[x_i] - E[y x_i]` under `D_w`.
pub fn exact_i(d: &ProductDistribution, f: &TargetFunction, w: &PartialAssignment, i: usize) -> Result<f64> {
    check_feature(f, w, i)?;
    let cube = reachable_subcube(d, f, w)?;
    let Some(t) = f.support_position(i) else {
        // x_i is independent of the label.
        return Ok(0.0);
    };
    let [_, _, _, x1y1] = split_masses(f, &cube, t);
    let y1 = label_masses(f, &cube).1;
    Ok(y1 * d.p(i) - x1y1)
}

/// `Gain(D_w, i)` with exact conditional probabilities.
pub fn exact_gain(
    d: &ProductDistribution,
    f: &TargetFunction,
    w: &PartialAssignment,
    i: usize,
    impurity: Impurity,
) -> Result<f64> {
    check_feature(f, w, i)?;
    let cube = reachable_subcube(d, f, w)?;
    let Some(t) = f.support_position(i) else {
        // Conditionals equal the unconditional label probability.
        return Ok(0.0);
    };
    Ok(gain_from_masses(split_masses(f, &cube, t), impurity))
}

pub(crate) fn gain_from_masses([x0, x0y1, x1, x1y1]: [f64; 4], impurity: Impurity) -> f64 {
    if x0 <= 0.0 || x1 <= 0.0 {
        return 0.0;
    }
    let total = x0 + x1;
    let c = |q: f64| impurity.value(q.clamp(0.0, 1.0));
    c((x0y1 + x1y1) / total) - (x1 / total) * c(x1y1 / x1) - (x0 / total) * c(x0y1 / x0)
}

/// `L_D(T) = Pr_{x∼D}(T(x) ≠ f(x))`.
pub fn exact_tree_loss(d: &ProductDistribution, f: &TargetFunction, tree: &DecisionTree) -> Result<f64> {
    let free = PartialAssignment::free(f.n());
    check_inputs(d, f, &free)?;
    if let Some(max) = tree.max_feature() {
        if max >= f.n() {
            return Err(Error::IndexOutOfRange { index: max, n: f.n() });
        }
    }
    leaf_losses(d, f, tree, free, 1.0)
}

fn leaf_losses(
    d: &ProductDistribution,
    f: &TargetFunction,
    node: &DecisionTree,
    w: PartialAssignment,
    reach: f64,
) -> Result<f64> {
    if reach <= 0.0 {
        return Ok(0.0);
    }
    match node {
        DecisionTree::Leaf(label) => {
            let cube = subcube(d, f, &w)?;
            let (m0, m1) = label_masses(f, &cube);
            Ok(reach * if *label { m0 } else { m1 })
        }
        DecisionTree::Split { feature, zero, one } => match w.get(*feature) {
            // A repeated feature: only the consistent branch is reachable.
            Some(false) => leaf_losses(d, f, zero, w, reach),
            Some(true) => leaf_losses(d, f, one, w, reach),
            None => {
                let p = d.p(*feature);
                let l0 = leaf_losses(d, f, zero, w.with(*feature, false)?, reach * (1.0 - p))?;
                let l1 = leaf_losses(d, f, one, w.with(*feature, true)?, reach * p)?;
                Ok(l0 + l1)
            }
        },
    }
}

fn parity_checks(probs: &[f64], support: &[usize], w: &PartialAssignment) -> Result<()> {
    if w.len() != probs.len() {
        return Err(Error::DimensionMismatch {
            expected: probs.len(),
            found: w.len(),
        });
    }
    if let Some(&bad) = support.iter().find(|&&i| i >= probs.len()) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            n: probs.len(),
        });
    }
    Ok(())
}

/// Closed form of `|I(D_w, j)|` for the parity `χ_J`:
/// `p_j (1 - p_j) 2^{k'-1} ∏ |p_i - 1/2|` over the other free support
/// coordinates, `k'` being the number of free support coordinates.
pub fn parity_i_closed_form(
    d: &ProductDistribution,
    support: &[usize],
    w: &PartialAssignment,
    j: usize,
) -> Result<f64> {
    parity_checks(d.probs(), support, w)?;
    if !support.contains(&j) {
        return Err(Error::NotInSupport(j));
    }
    if !w.is_free(j) {
        return Err(Error::CoordinateFixed(j));
    }
    let free: Vec<usize> = support.iter().copied().filter(|&i| w.is_free(i)).collect();
    let prod: f64 = free
        .iter()
        .filter(|&&i| i != j)
        .map(|&i| (d.p(i) - 0.5).abs())
        .product();
    let pj = d.p(j);
    Ok(pj * (1.0 - pj) * 2f64.powi(free.len() as i32 - 1) * prod)
}

/// Closed form of `Pr_{D_w}(χ_J = 1)`: `1/2 - (-1)^{k'+s} 2^{k'-1} ∏ (p_i - 1/2)`
/// over the `k'` free support coordinates, `s` being the parity of the fixed
/// support bits.
pub fn parity_label_prob_closed_form(
    d: &ProductDistribution,
    support: &[usize],
    w: &PartialAssignment,
) -> Result<f64> {
    parity_checks(d.probs(), support, w)?;
    let mut free = 0i32;
    let mut fixed_ones = 0i32;
    let mut prod = 1.0;
    for &i in support {
        match w.get(i) {
            None => {
                free += 1;
                prod *= d.p(i) - 0.5;
            }
            Some(b) => fixed_ones += i32::from(b),
        }
    }
    let sign = if (free + fixed_ones) % 2 == 0 { 1.0 } else { -1.0 };
    Ok(0.5 - sign * 2f64.powi(free - 1) * prod)
}

/// `α² (2c)^{k-1}`: the lower bound on `|I(D_w, j)|` for parities over an
/// `(α, c)`-distribution.
pub fn parity_lower_bound(alpha: f64, c: f64, k: usize) -> f64 {
    alpha * alpha * (2.0 * c).powi(k as i32 - 1)
}

/// Serialises `f64::INFINITY` as the string `"inf"` (JSON has no infinity).
pub(crate) fn serialize_extended_f64<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_infinite() {
        s.serialize_str(if *v > 0.0 { "inf" } else { "-inf" })
    } else {
        s.serialize_f64(*v)
    }
}

/// One restriction `w` with `supp(w) ⊆ J`.
#[derive(Clone, Debug, Serialize)]
pub struct SubcubeReport {
    pub w: PartialAssignment,
    /// `Pr(X_w) = 0`; the subcube cannot be observed.
    pub unreachable: bool,
    pub pure: bool,
    /// `min |I(D_w, i)|` over the free support coordinates; infinite when pure.
    #[serde(serialize_with = "serialize_extended_f64")]
    pub min_abs_i: f64,
    /// `min Gain(D_w, i)` over the free support coordinates; infinite when pure.
    #[serde(serialize_with = "serialize_extended_f64")]
    pub min_gain: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BasicConditionsReport {
    /// The largest `ε` for which every reachable subcube is pure or has
    /// `|I(D_w, i)| ≥ ε` for all free support coordinates. `0` when the
    /// hypothesis fails and infinite when every subcube is pure.
    #[serde(serialize_with = "serialize_extended_f64")]
    pub largest_epsilon: f64,
    /// The `ε` that was asked about.
    pub epsilon: f64,
    /// `largest_epsilon ≥ epsilon > 0`.
    pub holds: bool,
    pub subcubes: Vec<SubcubeReport>,
}

/// Checks the population-level hypothesis of the zero-loss guarantee over all
/// `3^k` restrictions of the support: each `D_w` is pure or every free support
/// coordinate has `|I(D_w, i)| ≥ ε`.
pub fn verify_basic_conditions(
    d: &ProductDistribution,
    f: &TargetFunction,
    impurity: Impurity,
    epsilon: f64,
) -> Result<BasicConditionsReport> {
    check_inputs(d, f, &PartialAssignment::free(f.n()))?;
    let k = f.k();
    let mut subcubes = Vec::new();
    let mut largest = f64::INFINITY;
    let mut digits = vec![0u8; k];
    loop {
        let mut w = PartialAssignment::free(f.n());
        for (t, &digit) in digits.iter().enumerate() {
            if digit > 0 {
                w = w.with(f.support()[t], digit == 2)?;
            }
        }
        subcubes.push(inspect_subcube(d, f, w, impurity)?);
        let last = subcubes.last().expect("just pushed");
        if !last.unreachable && !last.pure {
            largest = largest.min(last.min_abs_i);
        }

        // Ternary counter: 0 = free, 1 = fixed to 0, 2 = fixed to 1.
        let Some(pos) = digits.iter().position(|&x| x < 2) else {
            break;
        };
        digits[pos] += 1;
        digits[..pos].iter_mut().for_each(|x| *x = 0);
    }
    Ok(BasicConditionsReport {
        largest_epsilon: largest,
        epsilon,
        holds: epsilon > 0.0 && largest >= epsilon,
        subcubes,
    })
}

fn inspect_subcube(
    d: &ProductDistribution,
    f: &TargetFunction,
    w: PartialAssignment,
    impurity: Impurity,
) -> Result<SubcubeReport> {
    let cube = subcube(d, f, &w)?;
    if cube.mass <= 0.0 {
        return Ok(SubcubeReport {
            w,
            unreachable: true,
            pure: false,
            min_abs_i: f64::INFINITY,
            min_gain: f64::INFINITY,
        });
    }
    let (m0, m1) = label_masses(f, &cube);
    let pure = m0 == 0.0 || m1 == 0.0;
    let mut min_abs_i = f64::INFINITY;
    let mut min_gain = f64::INFINITY;
    if !pure {
        for (t, &i) in f.support().iter().enumerate() {
            if w.is_free(i) {
                let masses = split_masses(f, &cube, t);
                min_abs_i = min_abs_i.min((m1 * d.p(i) - masses[3]).abs());
                min_gain = min_gain.min(gain_from_masses(masses, impurity));
            }
        }
    }
    Ok(SubcubeReport {
        w,
        unreachable: false,
        pure,
        min_abs_i,
        min_gain,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: sums the full joint law over all of `{0,1}^n`.
    struct BruteForce {
        /// `(x, weight, y)` restricted to `X_w`, weights normalised.
        rows: Vec<(Vec<bool>, f64, bool)>,
    }

    impl BruteForce {
        fn new(d: &ProductDistribution, f: &TargetFunction, w: &PartialAssignment) -> Self {
            let n = d.n();
            let mut rows = Vec::new();
            let mut total = 0.0;
            for x in 0..1u64 << n {
                let bits: Vec<bool> = (0..n).map(|i| x >> i & 1 == 1).collect();
                if (0..n).any(|i| w.get(i).is_some_and(|b| b != bits[i])) {
                    continue;
                }
                let weight: f64 = (0..n).map(|i| d.prob_of(i, bits[i])).product();
                let y = f.evaluate(&crate::bits::BitVec::from_bools(&bits)).unwrap();
                total += weight;
                rows.push((bits, weight, y));
            }
            rows.iter_mut().for_each(|r| r.1 /= total);
            BruteForce { rows }
        }

        fn mean(&self, g: impl Fn(&[bool], bool) -> f64) -> f64 {
            self.rows.iter().map(|(x, wt, y)| wt * g(x, *y)).sum()
        }

        fn label_prob(&self) -> f64 {
            self.mean(|_, y| f64::from(u8::from(y)))
        }

        fn i_stat(&self, i: usize) -> f64 {
            let ey = self.label_prob();
            let ex = self.mean(|x, _| f64::from(u8::from(x[i])));
            let exy = self.mean(|x, y| f64::from(u8::from(x[i] && y)));
            ey * ex - exy
        }

        fn gain(&self, i: usize, c: Impurity) -> f64 {
            let px1 = self.mean(|x, _| f64::from(u8::from(x[i])));
            let py1x1 = self.mean(|x, y| f64::from(u8::from(x[i] && y)));
            let py1x0 = self.mean(|x, y| f64::from(u8::from(!x[i] && y)));
            if px1 == 0.0 || px1 == 1.0 {
                return 0.0;
            }
            c.value(self.label_prob())
                - px1 * c.value(py1x1 / px1)
                - (1.0 - px1) * c.value(py1x0 / (1.0 - px1))
        }
    }

    fn parity2() -> (ProductDistribution, TargetFunction) {
        (
            ProductDistribution::constant(2, 0.75).unwrap(),
            TargetFunction::parity(2, vec![0, 1]).unwrap(),
        )
    }

    #[test]
    fn label_prob_of_biased_two_parity() {
        let (d, f) = parity2();
        let free = PartialAssignment::free(2);
        let brute = BruteForce::new(&d, &f, &free).label_prob();
        assert_eq!(brute, 0.375);
        assert_eq!(exact_label_prob(&d, &f, &free).unwrap(), 0.375);
        assert_eq!(parity_label_prob_closed_form(&d, &[0, 1], &free).unwrap(), 0.375);
    }

    #[test]
    fn label_prob_special_cases() {
        let d = ProductDistribution::new(vec![0.3, 0.9, 0.6]).unwrap();
        let one = TargetFunction::constant(3, true);
        for w in ["***", "1*0", "011"] {
            let w = PartialAssignment::parse(w).unwrap();
            assert_eq!(exact_label_prob(&d, &one, &w).unwrap(), 1.0);
        }
        let and = TargetFunction::new(3, vec![0, 2], vec![false, false, false, true]).unwrap();
        for (w, expected) in [("1*1", 1.0), ("0*1", 0.0), ("1*0", 0.0)] {
            let w = PartialAssignment::parse(w).unwrap();
            assert_eq!(exact_label_prob(&d, &and, &w).unwrap(), expected);
        }
    }

    #[test]
    fn zero_mass_restriction() {
        let d = ProductDistribution::new(vec![1.0, 0.5]).unwrap();
        let f = TargetFunction::parity(2, vec![0, 1]).unwrap();
        let w = PartialAssignment::parse("0*").unwrap();
        assert_eq!(exact_label_prob(&d, &f, &w), Err(Error::ZeroMassRestriction));
        assert_eq!(exact_i(&d, &f, &w, 1), Err(Error::ZeroMassRestriction));
    }

    #[test]
    fn i_values() {
        let (d, f) = parity2();
        let free = PartialAssignment::free(2);
        let brute = BruteForce::new(&d, &f, &free).i_stat(0);
        assert_eq!(brute, 0.09375);
        assert_eq!(exact_i(&d, &f, &free, 0).unwrap(), 0.09375);
        assert_eq!(parity_i_closed_form(&d, &[0, 1], &free, 0).unwrap(), 0.09375);
    }

    #[test]
    fn i_outside_support_is_zero() {
        let d = ProductDistribution::new(vec![0.7, 0.2, 0.4, 0.9]).unwrap();
        let f = TargetFunction::new(4, vec![0, 2], vec![false, true, true, true]).unwrap();
        let w = PartialAssignment::parse("****").unwrap();
        assert_eq!(exact_i(&d, &f, &w, 1).unwrap(), 0.0);
        assert_eq!(exact_i(&d, &f, &w, 3).unwrap(), 0.0);
        assert_eq!(exact_gain(&d, &f, &w, 3, Impurity::Gini).unwrap(), 0.0);
    }

    #[test]
    fn i_with_one_free_junta_coordinate() {
        // f = x0 XOR x1 XOR x2 with x0, x2 fixed: |I| = p_1 (1 - p_1).
        let d = ProductDistribution::new(vec![0.7, 0.35, 0.2]).unwrap();
        let f = TargetFunction::parity(3, vec![0, 1, 2]).unwrap();
        let w = PartialAssignment::parse("1*0").unwrap();
        let brute = BruteForce::new(&d, &f, &w).i_stat(1).abs();
        assert!((brute - 0.35 * 0.65).abs() < 1e-15);
        assert!((exact_i(&d, &f, &w, 1).unwrap().abs() - 0.35 * 0.65).abs() < 1e-15);
    }

    #[test]
    fn feature_errors() {
        let (d, f) = parity2();
        let w = PartialAssignment::parse("1*").unwrap();
        assert_eq!(exact_i(&d, &f, &w, 0), Err(Error::CoordinateFixed(0)));
        assert!(matches!(exact_i(&d, &f, &w, 5), Err(Error::IndexOutOfRange { .. })));
        assert_eq!(
            parity_i_closed_form(&d, &[0, 1], &w, 0),
            Err(Error::CoordinateFixed(0))
        );
        let d3 = ProductDistribution::uniform(3);
        assert_eq!(
            parity_i_closed_form(&d3, &[0, 1], &PartialAssignment::free(3), 2),
            Err(Error::NotInSupport(2))
        );
    }

    #[test]
    fn gains() {
        let (d, f) = parity2();
        let free = PartialAssignment::free(2);
        let brute = BruteForce::new(&d, &f, &free).gain(0, Impurity::Gini);
        assert_eq!(brute, 0.046875);
        assert_eq!(exact_gain(&d, &f, &free, 0, Impurity::Gini).unwrap(), 0.046875);

        let u = ProductDistribution::uniform(5);
        let parity = TargetFunction::parity(5, vec![0, 2, 3]).unwrap();
        for i in 0..5 {
            assert_eq!(
                exact_gain(&u, &parity, &PartialAssignment::free(5), i, Impurity::Gini).unwrap(),
                0.0
            );
        }
    }

    #[test]
    fn matches_brute_force_on_small_instances() {
        let d = ProductDistribution::new(vec![0.3, 0.8, 0.55, 0.1, 0.65]).unwrap();
        let f = TargetFunction::new(
            5,
            vec![0, 1, 3],
            vec![true, false, false, true, true, true, false, true],
        )
        .unwrap();
        for ws in ["*****", "1****", "*0*1*", "**1*0", "0*0**"] {
            let w = PartialAssignment::parse(ws).unwrap();
            let brute = BruteForce::new(&d, &f, &w);
            assert!((exact_label_prob(&d, &f, &w).unwrap() - brute.label_prob()).abs() < 1e-14);
            for i in (0..5).filter(|&i| w.is_free(i)) {
                assert!((exact_i(&d, &f, &w, i).unwrap() - brute.i_stat(i)).abs() < 1e-14);
                for c in Impurity::ALL {
                    let g = exact_gain(&d, &f, &w, i, c).unwrap();
                    assert!((g - brute.gain(i, c)).abs() < 1e-13, "{ws} {i} {c}");
                }
            }
        }
    }

    #[test]
    fn subcube_weights_sum_to_one() {
        let d = ProductDistribution::new(vec![0.3, 0.8, 0.55, 0.1]).unwrap();
        let f = TargetFunction::parity(4, vec![0, 1, 2, 3]).unwrap();
        let w = PartialAssignment::parse("*1**").unwrap();
        let cube = subcube(&d, &f, &w).unwrap();
        assert_eq!(cube.weights.len(), 8);
        assert!((cube.mass - 0.8).abs() < 1e-15);
        let total: f64 = cube.weights.iter().map(|s| s.weight).sum();
        assert!((total - 1.0).abs() < 1e-15);
        assert!(cube.weights.iter().all(|s| s.pattern & 0b10 != 0));
    }

    #[test]
    fn tree_losses() {
        let (d, f) = parity2();
        assert_eq!(exact_tree_loss(&d, &f, &DecisionTree::leaf(false)).unwrap(), 0.375);
        assert_eq!(exact_tree_loss(&d, &f, &DecisionTree::leaf(true)).unwrap(), 0.625);
        let exact = DecisionTree::split(
            0,
            DecisionTree::split(1, DecisionTree::leaf(false), DecisionTree::leaf(true)),
            DecisionTree::split(1, DecisionTree::leaf(true), DecisionTree::leaf(false)),
        );
        assert_eq!(exact_tree_loss(&d, &f, &exact).unwrap(), 0.0);
        let bad = DecisionTree::split(2, DecisionTree::leaf(false), DecisionTree::leaf(true));
        assert!(exact_tree_loss(&d, &f, &bad).is_err());
    }

    #[test]
    fn tree_loss_matches_brute_force() {
        let d = ProductDistribution::new(vec![0.3, 0.8, 0.55, 0.1]).unwrap();
        let f = TargetFunction::new(4, vec![1, 2], vec![false, true, true, false]).unwrap();
        let tree = DecisionTree::split(
            1,
            DecisionTree::split(3, DecisionTree::leaf(true), DecisionTree::leaf(false)),
            DecisionTree::split(2, DecisionTree::leaf(true), DecisionTree::leaf(true)),
        );
        let brute: f64 = BruteForce::new(&d, &f, &PartialAssignment::free(4))
            .rows
            .iter()
            .filter(|(x, _, y)| {
                tree.evaluate(&crate::bits::BitVec::from_bools(x)).unwrap() != *y
            })
            .map(|r| r.1)
            .sum();
        assert!((exact_tree_loss(&d, &f, &tree).unwrap() - brute).abs() < 1e-15);
    }

    #[test]
    fn closed_form_special_cases() {
        let d = ProductDistribution::new(vec![0.5, 0.8, 0.3]).unwrap();
        let free = PartialAssignment::free(3);
        assert_eq!(parity_i_closed_form(&d, &[0, 1, 2], &free, 1).unwrap(), 0.0);
        let only_j = PartialAssignment::parse("1*0").unwrap();
        assert!((parity_i_closed_form(&d, &[0, 1, 2], &only_j, 1).unwrap() - 0.8 * 0.2).abs() < 1e-16);
    }

    #[test]
    fn parity_bound_values() {
        assert!((parity_lower_bound(0.25, 0.2, 2) - 0.025).abs() < 1e-17);
        assert_eq!(parity_lower_bound(0.3, 0.1, 1), 0.09);
        assert_eq!(parity_lower_bound(0.25, 0.25, 4), 0.0078125);
    }

    #[test]
    fn basic_conditions() {
        let u = ProductDistribution::uniform(4);
        let f = TargetFunction::parity(4, vec![1, 2]).unwrap();
        let report = verify_basic_conditions(&u, &f, Impurity::Gini, 1e-6).unwrap();
        assert_eq!(report.largest_epsilon, 0.0);
        assert!(!report.holds);
        assert_eq!(report.subcubes.len(), 9);

        let (d, f) = parity2();
        let report = verify_basic_conditions(&d, &f, Impurity::Gini, 0.03125).unwrap();
        assert!(report.largest_epsilon >= parity_lower_bound(0.25, 0.25, 2));
        assert!(report.holds);

        let c = TargetFunction::new(3, vec![0, 1], vec![true; 4]).unwrap();
        let report = verify_basic_conditions(&ProductDistribution::uniform(3), &c, Impurity::Gini, 0.1).unwrap();
        assert_eq!(report.largest_epsilon, f64::INFINITY);
        assert!(report.holds);
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["largest_epsilon"], "inf");
    }
}
