//! Browser bindings for three interactive views of the id3-juntas library.
//!
//! Each export takes plain numbers and returns a JSON string. The logic lives
//! in ordinary functions returning `Result<String, String>` so it can be
//! tested natively; the `#[wasm_bindgen]` wrappers only convert errors.

use serde_json::json;
use wasm_bindgen::prelude::*;

use id3_juntas::config::{ProbsSpec, ProblemSpec, TargetSpec};
use id3_juntas::fourier::{anticoncentration_bound, anticoncentration_estimate, coordinate_split};
use id3_juntas::harness::Redraw;
use id3_juntas::oracle::parity_lower_bound;
use id3_juntas::rng::{derive_seed, stream, stream_rng};
use id3_juntas::{
    exact_gain, exact_i, exact_label_prob, id3_learn, random_junta, run_batch, sample_dataset, Impurity,
    LearnerPolicy, PartialAssignment, ProductDistribution, TargetFunction, TrialConfig,
};

const MAX_N: usize = 64;
const MAX_K: usize = 12;
/// Keeps a single call responsive in the page.
const MAX_EXAMPLES: usize = 4_000_000;
const CURVE_DRAWS: usize = 10_000;

fn check_shape(n: usize, k: usize) -> Result<(), String> {
    if n == 0 || n > MAX_N {
        return Err(format!("n must be in 1..={MAX_N}"));
    }
    if k == 0 || k > n.min(MAX_K) {
        return Err(format!("k must be in 1..={}", n.min(MAX_K)));
    }
    Ok(())
}

fn err(e: impl ToString) -> String {
    e.to_string()
}

/// Exact `I` and gain of every feature at the root, for the parity on the
/// first `k` of `n` coordinates with every `p_i = p`.
pub fn gain_landscape_json(n: usize, k: usize, p: f64, impurity: &str) -> Result<String, String> {
    check_shape(n, k)?;
    let impurity: Impurity = impurity.parse().map_err(err)?;
    let d = ProductDistribution::constant(n, p).map_err(err)?;
    let f = TargetFunction::parity(n, (0..k).collect()).map_err(err)?;
    let w = PartialAssignment::free(n);
    let features = (0..n)
        .map(|i| {
            Ok(json!({
                "i": i,
                "in_support": i < k,
                "I": exact_i(&d, &f, &w, i).map_err(err)?,
                "gain": exact_gain(&d, &f, &w, i, impurity).map_err(err)?,
            }))
        })
        .collect::<Result<Vec<_>, String>>()?;
    // Every p_i = p is an (α, c)-distribution for any α < min(p, 1-p) and
    // c < |p - 1/2|; the bound's supremum over those.
    let alpha = p.min(1.0 - p);
    let c = (p - 0.5).abs();
    Ok(json!({
        "label_prob": exact_label_prob(&d, &f, &w).map_err(err)?,
        "features": features,
        "lower_bound": if c > 0.0 && alpha > 0.0 { parity_lower_bound(alpha, c, k) } else { 0.0 },
    })
    .to_string())
}

/// A batch of seeded trials learning that parity from `m` examples, plus the
/// tree learned in the first trial.
pub fn learning_run_json(n: usize, k: usize, p: f64, m: usize, trials: usize, seed: u64) -> Result<String, String> {
    check_shape(n, k)?;
    if m.saturating_mul(trials) > MAX_EXAMPLES {
        return Err(format!("m x trials must stay below {MAX_EXAMPLES} in the browser"));
    }
    let cfg = TrialConfig {
        problem: ProblemSpec {
            n,
            probs: ProbsSpec::Fixed(vec![p; n]),
            target: TargetSpec::Parity {
                support: (0..k).collect(),
            },
        },
        m,
        trials,
        seed,
        policy: LearnerPolicy::default(),
        redraw: Redraw::PerTrial,
    };
    let summary = run_batch(&cfg, 1).map_err(err)?;
    // Same draws as trial 0.
    let (d, f) = cfg.instance(0).map_err(err)?;
    let s = sample_dataset(&d, &f, m, derive_seed(seed, stream::SAMPLE)).map_err(err)?;
    let features: Vec<usize> = (0..n).collect();
    let tree = id3_learn(&s, &features, &cfg.policy, derive_seed(seed, stream::LEARNER)).map_err(err)?;
    let rows: Vec<_> = summary
        .results
        .iter()
        .map(|r| {
            json!({
                "trial": r.trial,
                "exact_loss": r.exact_loss,
                "success": r.success,
                "tree_size": r.tree_size,
                "junta_only": r.junta_only,
            })
        })
        .collect();
    Ok(json!({
        "success_rate": summary.success_rate,
        "mean_loss": summary.mean_loss,
        "mean_tree_size": summary.mean_tree_size,
        "trials": rows,
        "first_tree": tree.to_text(),
    })
    .to_string())
}

/// `Pr(|g_0(Δ)| ≤ ε)` on a log grid of `ε` for a random `k`-junta around
/// `p̂ = 1/2`, against the envelope `(2/c)^k √ε`.
pub fn anticoncentration_curve_json(k: usize, c: f64, seed: u64) -> Result<String, String> {
    check_shape(k, k)?;
    if !(c > 0.0 && c < 0.5) {
        return Err("c must be in (0, 1/2)".into());
    }
    let f = random_junta(k, (0..k).collect(), &mut stream_rng(seed, stream::TARGET)).map_err(err)?;
    let base = vec![0.5; k];
    let w = PartialAssignment::free(k);
    let mut split = None;
    for i in 0..k {
        let s = coordinate_split(&f, &w, i, &base).map_err(err)?;
        if !s.g0.is_zero() {
            split = Some((i, s));
            break;
        }
    }
    let (coordinate, split) = split.ok_or("every derivative vanishes")?;
    let points = (0..=10)
        .map(|t| {
            let eps = 10f64.powf(-6.0 + 0.5 * t as f64);
            let estimate =
                anticoncentration_estimate(&split.g0, c, eps, CURVE_DRAWS, derive_seed(seed, t)).map_err(err)?;
            Ok(json!({"eps": eps, "estimate": estimate, "bound": anticoncentration_bound(c, k, eps)}))
        })
        .collect::<Result<Vec<_>, String>>()?;
    let table: Vec<u8> = f.table().iter().map(|&b| u8::from(b)).collect();
    Ok(json!({
        "table": table,
        "coordinate": coordinate,
        "draws": CURVE_DRAWS,
        "points": points,
    })
    .to_string())
}

fn to_js(r: Result<String, String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn gain_landscape(n: usize, k: usize, p: f64, impurity: &str) -> Result<String, JsValue> {
    to_js(gain_landscape_json(n, k, p, impurity))
}

#[wasm_bindgen]
pub fn learning_run(n: usize, k: usize, p: f64, m: usize, trials: usize, seed: u64) -> Result<String, JsValue> {
    to_js(learning_run_json(n, k, p, m, trials, seed))
}

#[wasm_bindgen]
pub fn anticoncentration_curve(k: usize, c: f64, seed: u64) -> Result<String, JsValue> {
    to_js(anticoncentration_curve_json(k, c, seed))
}
