//! Fourier analysis of junta truth tables over the `±1` characters
//! `χ_I(x) = ∏_{i∈I} (2x_i - 1)`, and the polynomials used to study how
//! smoothing the distribution keeps `|I(D_w, i)|` away from zero.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::assignment::PartialAssignment;
use crate::error::{Error, Result};
use crate::target::TargetFunction;

/// Largest arity accepted by [`fourier_coeffs`].
pub const MAX_FOURIER_ARITY: usize = 20;

/// Monomial basis of a [`MultilinearPolynomial`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    /// Monomials `∏_{i∈I} (2x_i - 1)`.
    Character,
    /// Monomials `∏_{i∈I} x_i`.
    Monomial,
}

/// A multilinear polynomial with dense coefficients indexed by subset bitmask.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultilinearPolynomial {
    pub arity: usize,
    pub basis: Basis,
    pub coeffs: Vec<f64>,
}

impl MultilinearPolynomial {
    pub fn zero(arity: usize, basis: Basis) -> Self {
        MultilinearPolynomial {
            arity,
            basis,
            coeffs: vec![0.0; 1 << arity],
        }
    }

    pub fn coeff(&self, mask: usize) -> f64 {
        self.coeffs[mask]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// Largest `|I|` with a nonzero coefficient; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0.0)
            .map(|(m, _)| m.count_ones() as usize)
            .max()
    }

    /// Evaluates at a real point (the multilinear extension).
    pub fn evaluate(&self, point: &[f64]) -> f64 {
        assert_eq!(point.len(), self.arity, "point has the wrong arity");
        let mut buf = self.coeffs.clone();
        // Fold out the highest coordinate first.
        for i in (0..self.arity).rev() {
            let v = match self.basis {
                Basis::Character => 2.0 * point[i] - 1.0,
                Basis::Monomial => point[i],
            };
            let half = 1 << i;
            for m in 0..half {
                buf[m] += v * buf[m | half];
            }
            buf.truncate(half);
        }
        buf[0]
    }

    /// Evaluates at a vertex of the cube, given as a bit pattern.
    pub fn evaluate_bits(&self, pattern: usize) -> f64 {
        let point: Vec<f64> = (0..self.arity).map(|i| (pattern >> i & 1) as f64).collect();
        self.evaluate(&point)
    }
}

/// Fourier coefficients `α_I` of a truth table of arity `k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FourierExpansion {
    pub k: usize,
    pub coeffs: Vec<f64>,
}

impl FourierExpansion {
    pub fn alpha(&self, mask: usize) -> f64 {
        self.coeffs[mask]
    }

    pub fn to_polynomial(&self) -> MultilinearPolynomial {
        MultilinearPolynomial {
            arity: self.k,
            basis: Basis::Character,
            coeffs: self.coeffs.clone(),
        }
    }

    /// `Σ_I α_I χ_I(x)` at the vertex `pattern`.
    pub fn reconstruct(&self, pattern: usize) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(mask, &a)| {
                let sign = if (mask.count_ones() - (mask & pattern).count_ones()).is_multiple_of(2) {
                    1.0
                } else {
                    -1.0
                };
                a * sign
            })
            .sum()
    }
}

fn arity_of(len: usize) -> Result<usize> {
    if !len.is_power_of_two() {
        return Err(Error::InvalidParameter(format!(
            "truth table length {len} is not a power of two"
        )));
    }
    let k = len.trailing_zeros() as usize;
    if k > MAX_FOURIER_ARITY {
        return Err(Error::EnumerationLimit {
            k,
            limit: MAX_FOURIER_ARITY,
        });
    }
    Ok(k)
}

/// `α_I = 2^{-k} Σ_x χ_I(x) f(x)` for every `I`, by a Walsh-Hadamard transform.
pub fn fourier_coeffs(table: &[bool]) -> Result<FourierExpansion> {
    let k = arity_of(table.len())?;
    let mut a: Vec<f64> = table.iter().map(|&b| f64::from(u8::from(b))).collect();
    for i in 0..k {
        let h = 1 << i;
        for m in (0..a.len()).filter(|m| m & h == 0) {
            let (u, v) = (a[m], a[m | h]);
            a[m] = u + v;
            a[m | h] = v - u;
        }
    }
    let scale = (1u64 << k) as f64;
    a.iter_mut().for_each(|c| *c /= scale);
    Ok(FourierExpansion { k, coeffs: a })
}

/// The junta with some support coordinates fixed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RestrictedTarget {
    /// Global indices of the free support coordinates; local bit `t` is
    /// `coords[t]`.
    pub coords: Vec<usize>,
    pub table: Vec<bool>,
}

/// `f_w`: the truth table of `f` over its free support coordinates.
pub fn restrict_target(f: &TargetFunction, w: &PartialAssignment) -> Result<RestrictedTarget> {
    if w.len() != f.n() {
        return Err(Error::DimensionMismatch {
            expected: f.n(),
            found: w.len(),
        });
    }
    if let Some(i) = w.support().into_iter().find(|&i| !f.in_support(i)) {
        return Err(Error::NotInSupport(i));
    }
    let mut base = 0usize;
    let mut free_bits = Vec::new();
    let mut coords = Vec::new();
    for (t, &i) in f.support().iter().enumerate() {
        match w.get(i) {
            Some(true) => base |= 1 << t,
            Some(false) => {}
            None => {
                free_bits.push(t);
                coords.push(i);
            }
        }
    }
    let table = (0..1usize << free_bits.len())
        .map(|local| {
            let pattern = free_bits
                .iter()
                .enumerate()
                .fold(base, |acc, (s, &t)| acc | ((local >> s & 1) << t));
            f.table()[pattern]
        })
        .collect();
    Ok(RestrictedTarget { coords, table })
}

/// Splits `F = (2x_i - 1) g + h` where neither `g` nor `h` depends on `x_i`.
/// Both keep the arity of `F`; their coefficients on monomials containing `i`
/// are zero.
pub fn split_on_coordinate(
    expansion: &FourierExpansion,
    i: usize,
) -> Result<(MultilinearPolynomial, MultilinearPolynomial)> {
    if i >= expansion.k {
        return Err(Error::IndexOutOfRange {
            index: i,
            n: expansion.k,
        });
    }
    let bit = 1 << i;
    let mut g = MultilinearPolynomial::zero(expansion.k, Basis::Character);
    let mut h = MultilinearPolynomial::zero(expansion.k, Basis::Character);
    for (mask, &a) in expansion.coeffs.iter().enumerate() {
        if mask & bit != 0 {
            g.coeffs[mask & !bit] = a;
        } else {
            h.coeffs[mask] = a;
        }
    }
    Ok((g, h))
}

/// `g_0(Δ) = g(p̂ + Δ)`, expanded in the monomials `∏ Δ_i`.
pub fn shift_polynomial(g: &MultilinearPolynomial, base: &[f64]) -> Result<MultilinearPolynomial> {
    if base.len() != g.arity {
        return Err(Error::DimensionMismatch {
            expected: g.arity,
            found: base.len(),
        });
    }
    let mut c = g.coeffs.clone();
    for (i, &p) in base.iter().enumerate() {
        // Each variable becomes offset + scale·Δ_i.
        let (offset, scale) = match g.basis {
            Basis::Character => (2.0 * p - 1.0, 2.0),
            Basis::Monomial => (p, 1.0),
        };
        let bit = 1 << i;
        for m in (0..c.len()).filter(|m| m & bit != 0) {
            let v = c[m];
            c[m & !bit] += offset * v;
            c[m] = scale * v;
        }
    }
    Ok(MultilinearPolynomial {
        arity: g.arity,
        basis: Basis::Monomial,
        coeffs: c,
    })
}

/// `G_0(ξ) = 2^{k'} / (2^{d} c^{d}) · g_0(c ξ)` with `d = deg g_0`, scaled so
/// that some top-degree coefficient has magnitude at least 1. `None` for the
/// zero polynomial.
pub fn normalize_shifted(g0: &MultilinearPolynomial, c: f64) -> Option<MultilinearPolynomial> {
    let d = g0.degree()?;
    let front = 2f64.powi(g0.arity as i32) / (2f64.powi(d as i32) * c.powi(d as i32));
    let coeffs = g0
        .coeffs
        .iter()
        .enumerate()
        .map(|(m, &b)| front * b * c.powi(m.count_ones() as i32))
        .collect();
    Some(MultilinearPolynomial {
        arity: g0.arity,
        basis: Basis::Monomial,
        coeffs,
    })
}

/// Monte-Carlo estimate of `Pr_{Δ∼Uni([-c,c]^{k'})}(|g_0(Δ)| ≤ eps)`.
pub fn anticoncentration_estimate(
    g0: &MultilinearPolynomial,
    c: f64,
    eps: f64,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut point = vec![0.0; g0.arity];
    let mut hits = 0usize;
    for _ in 0..trials {
        point
            .iter_mut()
            .for_each(|x| *x = c * (2.0 * rng.gen::<f64>() - 1.0));
        if g0.evaluate(&point).abs() <= eps {
            hits += 1;
        }
    }
    Ok(hits as f64 / trials as f64)
}

/// `(2/c)^k √ε`, the anti-concentration envelope for `|g_0| ≤ ε`.
pub fn anticoncentration_bound(c: f64, k: usize, eps: f64) -> f64 {
    (2.0 / c).powi(k as i32) * eps.sqrt()
}

/// `2 α² δ² (c/2)^{2k}`: with probability at least `1 - δ` over the smoothing
/// noise, some free support coordinate has `|I(D_w, i)|` above this.
pub fn junta_i_lower_bound(alpha: f64, c: f64, k: usize, delta: f64) -> f64 {
    2.0 * alpha * alpha * delta * delta * (c / 2.0).powi(2 * k as i32)
}

/// The derivative part of `f_w` along one coordinate, before and after the
/// shift `x = p̂ + Δ`.
#[derive(Clone, Debug, Serialize)]
pub struct CoordinateSplit {
    pub restricted: RestrictedTarget,
    pub coefficients: FourierExpansion,
    /// Local index of the split coordinate within `restricted.coords`.
    pub local: usize,
    pub g: MultilinearPolynomial,
    pub h: MultilinearPolynomial,
    pub g0: MultilinearPolynomial,
}

/// Restricts `f` by `w`, expands it, splits on support coordinate `i` and
/// shifts `g` around the base probabilities `base` (indexed globally).
pub fn coordinate_split(
    f: &TargetFunction,
    w: &PartialAssignment,
    i: usize,
    base: &[f64],
) -> Result<CoordinateSplit> {
    if base.len() != f.n() {
        return Err(Error::DimensionMismatch {
            expected: f.n(),
            found: base.len(),
        });
    }
    let restricted = restrict_target(f, w)?;
    let local = restricted
        .coords
        .iter()
        .position(|&c| c == i)
        .ok_or(if w.is_free(i) { Error::NotInSupport(i) } else { Error::CoordinateFixed(i) })?;
    let coefficients = fourier_coeffs(&restricted.table)?;
    let (g, h) = split_on_coordinate(&coefficients, local)?;
    let local_base: Vec<f64> = restricted.coords.iter().map(|&c| base[c]).collect();
    let g0 = shift_polynomial(&g, &local_base)?;
    Ok(CoordinateSplit {
        restricted,
        coefficients,
        local,
        g,
        h,
        g0,
    })
}
