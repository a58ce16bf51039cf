//! Sampling from product distributions, smoothed `(α, c)`-distributions, and
//! the sample-size formulas of the zero-loss guarantees.

use log::warn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bits::words_for;
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::product::ProductDistribution;
use crate::target::TargetFunction;

/// Parameters of a smoothed `(α, c)`-distribution: `p_i = p̂_i + Δ_i` with
/// `Δ_i ∼ Uni([-c, c])`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothingSpec {
    pub alpha: f64,
    pub c: f64,
    pub base: Vec<f64>,
}

impl SmoothingSpec {
    pub fn new(alpha: f64, c: f64, base: Vec<f64>) -> Result<Self> {
        let spec = SmoothingSpec { alpha, c, base };
        spec.validate()?;
        Ok(spec)
    }

    /// `α > 0`, `c ≥ 0`, `α + c < 1/2` and every `p̂_i ∈ (α+c, 1-α-c)`.
    pub fn validate(&self) -> Result<()> {
        let SmoothingSpec { alpha, c, base } = self;
        // Written positively so that NaN fails.
        let in_range = *alpha > 0.0 && *c >= 0.0 && alpha + c < 0.5;
        if !in_range {
            return Err(Error::InvalidParameter(format!(
                "smoothing needs alpha > 0, c >= 0 and alpha + c < 1/2 (alpha={alpha}, c={c})"
            )));
        }
        if base.is_empty() {
            return Err(Error::InvalidParameter("smoothing base is empty".into()));
        }
        let lo = alpha + c;
        let hi = 1.0 - lo;
        if let Some((i, p)) = base.iter().enumerate().find(|(_, &p)| !(p > lo && p < hi)) {
            return Err(Error::InvalidParameter(format!(
                "base probability p[{i}] = {p} outside ({lo}, {hi})"
            )));
        }
        Ok(())
    }
}

/// Draws `m` examples `x ∼ ∏ Bernoulli(p_i)` labelled by `f`.
pub fn sample_dataset(d: &ProductDistribution, f: &TargetFunction, m: usize, seed: u64) -> Result<Dataset> {
    if m == 0 {
        return Err(Error::InvalidParameter("sample size must be at least 1".into()));
    }
    if d.n() != f.n() {
        return Err(Error::DimensionMismatch {
            expected: f.n(),
            found: d.n(),
        });
    }
    let n = d.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ds = Dataset::with_capacity(n, m)?;
    let mut row = vec![0u64; words_for(n)];
    for _ in 0..m {
        row.iter_mut().for_each(|w| *w = 0);
        for (i, &p) in d.probs().iter().enumerate() {
            if rng.gen::<f64>() < p {
                row[i / 64] |= 1 << (i % 64);
            }
        }
        ds.push_words(&row, f.eval_words(&row));
    }
    Ok(ds)
}

/// Draws `p_i = p̂_i + c (2u_i - 1)` with `u_i ∼ Uni([0, 1))`.
pub fn smoothed_distribution(spec: &SmoothingSpec, seed: u64) -> Result<ProductDistribution> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let probs = spec
        .base
        .iter()
        .map(|&p| p + spec.c * (2.0 * rng.gen::<f64>() - 1.0))
        .collect();
    ProductDistribution::new(probs)
}

fn is_alpha_c(p: f64, alpha: f64, c: f64) -> bool {
    (p - 0.5).abs() > c && p > alpha && p < 1.0 - alpha
}

/// Whether `|p_j - 1/2| > c` and `p_j ∈ (α, 1-α)` for every `j` in `support`.
pub fn validate_alpha_c(d: &ProductDistribution, support: &[usize], alpha: f64, c: f64) -> bool {
    support
        .iter()
        .all(|&j| j < d.n() && is_alpha_c(d.p(j), alpha, c))
}

/// [`validate_alpha_c`] over every coordinate.
pub fn validate_alpha_c_strict(d: &ProductDistribution, alpha: f64, c: f64) -> bool {
    d.probs().iter().all(|&p| is_alpha_c(p, alpha, c))
}

/// A sample size from a `m ≳ …` formula with the hidden constant set to 1.
/// Order-of-magnitude guidance only.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SampleSize {
    /// `⌈raw⌉`, or `u64::MAX` when saturated.
    pub value: u64,
    /// The unrounded formula value.
    pub raw: f64,
    pub saturated: bool,
}

impl SampleSize {
    fn from_raw(raw: f64) -> Self {
        let ceil = raw.max(1.0).ceil();
        if !ceil.is_finite() || ceil >= u64::MAX as f64 {
            warn!("sample-size formula overflows u64 ({raw:e}); saturating");
            SampleSize {
                value: u64::MAX,
                raw,
                saturated: true,
            }
        } else {
            SampleSize {
                value: ceil as u64,
                raw,
                saturated: false,
            }
        }
    }
}

fn require_positive(params: &[(&str, f64)]) -> Result<()> {
    match params.iter().find(|(_, v)| !(*v > 0.0 && v.is_finite())) {
        Some((name, v)) => Err(Error::InvalidParameter(format!("{name} must be positive, got {v}"))),
        None => Ok(()),
    }
}

fn require_k_n(k: usize, n: usize) -> Result<()> {
    if k == 0 || n == 0 {
        return Err(Error::InvalidParameter(format!("need k >= 1 and n >= 1 (k={k}, n={n})")));
    }
    Ok(())
}

/// `β^{-2} γ² ε^{-4} α^{-2k} k log(n/δ)`.
pub fn sample_size_basic(beta: f64, gamma: f64, eps: f64, alpha: f64, k: usize, n: usize, delta: f64) -> Result<SampleSize> {
    require_positive(&[("beta", beta), ("gamma", gamma), ("epsilon", eps), ("alpha", alpha), ("delta", delta)])?;
    require_k_n(k, n)?;
    let raw = gamma * gamma / (beta * beta) * eps.powi(-4) * alpha.powi(-2 * k as i32) * k as f64 * (n as f64 / delta).ln();
    Ok(SampleSize::from_raw(raw))
}

/// `β^{-2} γ² (2c)^{-4k-4} α^{-2k-8} k log(n/δ)`.
pub fn sample_size_parity(alpha: f64, c: f64, beta: f64, gamma: f64, k: usize, n: usize, delta: f64) -> Result<SampleSize> {
    require_positive(&[("alpha", alpha), ("c", c), ("beta", beta), ("gamma", gamma), ("delta", delta)])?;
    require_k_n(k, n)?;
    let k_i = k as i32;
    let raw = gamma * gamma / (beta * beta)
        * (2.0 * c).powi(-4 * k_i - 4)
        * alpha.powi(-2 * k_i - 8)
        * k as f64
        * (n as f64 / delta).ln();
    Ok(SampleSize::from_raw(raw))
}

/// `β^{-2} γ² c^{-8k} δ₁^{-8} α^{-2k-8} k log(n/δ₂)`.
#[allow(clippy::too_many_arguments)]
pub fn sample_size_junta(
    alpha: f64,
    c: f64,
    beta: f64,
    gamma: f64,
    k: usize,
    n: usize,
    delta1: f64,
    delta2: f64,
) -> Result<SampleSize> {
    require_positive(&[
        ("alpha", alpha),
        ("c", c),
        ("beta", beta),
        ("gamma", gamma),
        ("delta1", delta1),
        ("delta2", delta2),
    ])?;
    require_k_n(k, n)?;
    let k_i = k as i32;
    let raw = gamma * gamma / (beta * beta)
        * c.powi(-8 * k_i)
        * delta1.powi(-8)
        * alpha.powi(-2 * k_i - 8)
        * k as f64
        * (n as f64 / delta2).ln();
    Ok(SampleSize::from_raw(raw))
}

/// A junta on `support` whose table bits are fair coins, redrawn until the
/// table is not constant.
pub fn random_junta<R: Rng + ?Sized>(n: usize, support: Vec<usize>, rng: &mut R) -> Result<TargetFunction> {
    if support.is_empty() {
        return Err(Error::InvalidSupport("a random junta needs a nonempty support".into()));
    }
    let size = 1usize
        .checked_shl(support.len() as u32)
        .ok_or_else(|| Error::InvalidSupport("support too large".into()))?;
    // Validate before drawing.
    TargetFunction::new(n, support.clone(), vec![false; size])?;
    loop {
        let table: Vec<bool> = (0..size).map(|_| rng.gen::<bool>()).collect();
        if table.iter().any(|&b| b != table[0]) {
            return TargetFunction::new(n, support, table);
        }
    }
}
