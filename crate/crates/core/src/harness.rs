//! Seeded experiment runner: single trials, batches, parameter sweeps and
//! their CSV / JSON / SVG reports.
//!
//! Every trial is a pure function of `(config, index)`. Batches may run
//! trials on several threads, but results are ordered by index before
//! aggregation, so the thread count never changes the output bytes.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::{ProbsSpec, ProblemSpec, TargetSpec};
use crate::dataset::Dataset;
use crate::distributions::sample_dataset;
use crate::error::{Error, Result};
use crate::impurity::Impurity;
use crate::learner::{id3_learn, LearnerPolicy, NodeCounts};
use crate::oracle::exact_tree_loss;
use crate::product::ProductDistribution;
use crate::rng::{derive_seed, stream, trial_seed};
use crate::target::{TargetFunction, ENUMERATION_LIMIT};

/// When smoothing noise and random-junta tables are drawn.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Redraw {
    /// Each trial draws its own, from its trial seed.
    #[default]
    PerTrial,
    /// One draw from the master seed, shared by every trial.
    Fixed,
}

fn default_trials() -> usize {
    1
}

/// A problem plus everything needed to run trials on it.
///
/// In JSON the problem fields sit at the top level next to the run fields:
///
/// ```json
/// {"n": 8, "probs": [...], "target": {"type": "parity", "support": [0, 1]},
///  "m": 4096, "trials": 20, "seed": 7, "impurity": "gini",
///  "tie_break": "lowest-index", "redraw": "per-trial"}
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    #[serde(flatten)]
    pub problem: ProblemSpec,
    pub m: usize,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(flatten)]
    pub policy: LearnerPolicy,
    #[serde(default)]
    pub redraw: Redraw,
}

impl TrialConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: TrialConfig =
            serde_json::from_str(s).map_err(|e| Error::InvalidParameter(format!("trial config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.problem.validate()?;
        if self.k() > ENUMERATION_LIMIT {
            return Err(Error::EnumerationLimit {
                k: self.k(),
                limit: ENUMERATION_LIMIT,
            });
        }
        if self.m == 0 {
            return Err(Error::InvalidParameter("m must be at least 1".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.problem.n
    }

    pub fn k(&self) -> usize {
        self.problem.target.support().len()
    }

    /// Distribution and target used by trial `index`.
    pub fn instance(&self, index: usize) -> Result<(ProductDistribution, TargetFunction)> {
        let seed = match self.redraw {
            Redraw::PerTrial => trial_seed(self.seed, index as u64),
            Redraw::Fixed => self.seed,
        };
        self.problem.resolve(seed)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub trial: usize,
    pub seed: u64,
    /// `None` when the trial failed before a tree was scored.
    pub exact_loss: Option<f64>,
    pub success: bool,
    pub tree_size: usize,
    pub tree_depth: usize,
    pub junta_only: bool,
    /// `None` when the instance is too large to check.
    pub basic_conditions_held: Option<bool>,
    pub elapsed_ms: f64,
    pub error: Option<String>,
}

#[cfg(not(target_arch = "wasm32"))]
mod clock {
    use std::time::Instant;

    pub type Stamp = Instant;

    pub fn now() -> Stamp {
        Instant::now()
    }

    pub fn elapsed_ms(t: Stamp) -> f64 {
        t.elapsed().as_secs_f64() * 1e3
    }
}

// No monotonic clock on bare wasm32.
#[cfg(target_arch = "wasm32")]
mod clock {
    pub type Stamp = ();

    pub fn now() -> Stamp {}

    pub fn elapsed_ms(_: Stamp) -> f64 {
        0.0
    }
}

/// Draws the instance (with fresh smoothing noise if configured), samples
/// `m` examples, runs ID3 over all `n` features and scores the tree with the
/// exact oracle. Errors are recorded in the result.
pub fn run_trial(cfg: &TrialConfig, index: usize) -> TrialResult {
    let start = clock::now();
    let seed = trial_seed(cfg.seed, index as u64);
    let mut result = TrialResult {
        trial: index,
        seed,
        exact_loss: None,
        success: false,
        tree_size: 0,
        tree_depth: 0,
        junta_only: false,
        basic_conditions_held: None,
        elapsed_ms: 0.0,
        error: None,
    };
    match score_trial(cfg, index, seed, &mut result) {
        Ok(()) => {}
        Err(e) => {
            log::warn!("trial {index} failed: {e}");
            result.error = Some(e.to_string());
        }
    }
    result.elapsed_ms = clock::elapsed_ms(start);
    result
}

fn score_trial(cfg: &TrialConfig, index: usize, seed: u64, result: &mut TrialResult) -> Result<()> {
    let (d, f) = cfg.instance(index)?;
    let s = sample_dataset(&d, &f, cfg.m, derive_seed(seed, stream::SAMPLE))?;
    let features: Vec<usize> = (0..cfg.n()).collect();
    let tree = id3_learn(&s, &features, &cfg.policy, derive_seed(seed, stream::LEARNER))?;
    let loss = exact_tree_loss(&d, &f, &tree)?;
    result.exact_loss = Some(loss);
    result.success = loss == 0.0;
    result.tree_size = tree.size();
    result.tree_depth = tree.depth();
    result.junta_only = tree.features().iter().all(|&i| f.in_support(i));
    result.basic_conditions_held = sample_basic_conditions(&s, &f, cfg.policy.impurity)?;
    Ok(())
}

/// Largest `3^k · 2n` for which [`sample_basic_conditions`] runs.
pub const BASIC_CONDITIONS_BUDGET: usize = 1 << 22;

/// Empirical gain-dominance check on the sample: for every `w` fixing only
/// coordinates of the support `J`, `S_w` is nonempty and either pure or every
/// free `i ∈ J` has strictly larger gain on `S_w` than every `j ∉ J`.
///
/// When this holds, ID3 only splits on `J` and reaches every subcube, so the
/// learned tree has zero loss. Returns `None` if the check exceeds
/// [`BASIC_CONDITIONS_BUDGET`].
pub fn sample_basic_conditions(s: &Dataset, f: &TargetFunction, impurity: Impurity) -> Result<Option<bool>> {
    let (n, k) = (s.n(), f.k());
    if n != f.n() {
        return Err(Error::DimensionMismatch { expected: f.n(), found: n });
    }
    let cells = match 3usize.checked_pow(k as u32) {
        Some(c) if c.saturating_mul(2 * n.max(1)) <= BASIC_CONDITIONS_BUDGET => c,
        _ => return Ok(None),
    };
    // Cells are base-3 numbers over support positions: digit 0 or 1 fixes
    // the coordinate, 2 leaves it free.
    let pow3: Vec<usize> = (0..k).map(|t| 3usize.pow(t as u32)).collect();
    let cell_of_pattern: Vec<usize> = (0..1usize << k)
        .map(|p| (0..k).map(|t| ((p >> t) & 1) * pow3[t]).sum())
        .collect();

    let mut counts: Vec<NodeCounts> = (0..cells).map(|_| NodeCounts::zeros(n)).collect();
    for ex in s.iter() {
        counts[cell_of_pattern[f.pattern_of_words(ex.words())]].add_row(ex.words(), ex.label);
    }

    let outside: Vec<usize> = (0..n).filter(|&j| !f.in_support(j)).collect();
    let mut free = Vec::with_capacity(k);
    for w in 0..cells {
        free.clear();
        free.extend((0..k).filter(|&t| (w / pow3[t]) % 3 == 2));
        if let Some(&t) = free.first() {
            // Free digit 2 splits into the cells with 0 and 1 there, both smaller.
            let mut merged = counts[w - 2 * pow3[t]].clone();
            merged.add(&counts[w - pow3[t]]);
            counts[w] = merged;
        }
        let c = &counts[w];
        if c.total == 0 {
            return Ok(Some(false));
        }
        if c.label_ones == 0 || c.label_ones == c.total {
            continue;
        }
        let worst_inside = free
            .iter()
            .map(|&t| c.feature(f.support()[t]).gain(impurity))
            .fold(f64::INFINITY, f64::min);
        let best_outside = outside
            .iter()
            .map(|&j| c.feature(j).gain(impurity))
            .fold(f64::NEG_INFINITY, f64::max);
        let dominates = worst_inside > best_outside;
        if !dominates {
            return Ok(Some(false));
        }
    }
    Ok(Some(true))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub trials: usize,
    pub successes: usize,
    pub errors: usize,
    /// Fraction of trials with exact loss 0; failed trials count against it.
    pub success_rate: f64,
    /// Means over trials without errors; `None` if every trial failed.
    pub mean_loss: Option<f64>,
    pub mean_tree_size: Option<f64>,
    pub elapsed_ms: f64,
    pub results: Vec<TrialResult>,
}

impl BatchSummary {
    pub fn from_results(results: Vec<TrialResult>) -> Self {
        let trials = results.len();
        let successes = results.iter().filter(|r| r.success).count();
        let scored: Vec<&TrialResult> = results.iter().filter(|r| r.exact_loss.is_some()).collect();
        let mean = |xs: Vec<f64>| (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64);
        BatchSummary {
            trials,
            successes,
            errors: results.iter().filter(|r| r.error.is_some()).count(),
            success_rate: if trials == 0 { 0.0 } else { successes as f64 / trials as f64 },
            mean_loss: mean(scored.iter().filter_map(|r| r.exact_loss).collect()),
            mean_tree_size: mean(scored.iter().map(|r| r.tree_size as f64).collect()),
            elapsed_ms: results.iter().map(|r| r.elapsed_ms).sum(),
            results,
        }
    }
}

/// Runs every trial of `cfg`. `jobs` caps the worker threads: `1` runs
/// inline, `0` uses the default pool.
pub fn run_batch(cfg: &TrialConfig, jobs: usize) -> Result<BatchSummary> {
    cfg.validate()?;
    Ok(BatchSummary::from_results(run_trials(cfg, jobs)))
}

fn run_trials(cfg: &TrialConfig, jobs: usize) -> Vec<TrialResult> {
    #[cfg(feature = "parallel")]
    if jobs != 1 {
        use rayon::prelude::*;
        let run = || (0..cfg.trials).into_par_iter().map(|i| run_trial(cfg, i)).collect();
        if jobs == 0 {
            return run();
        }
        match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
            Ok(pool) => return pool.install(run),
            Err(e) => log::warn!("falling back to one thread: {e}"),
        }
    }
    #[cfg(not(feature = "parallel"))]
    let _ = jobs;
    (0..cfg.trials).map(|i| run_trial(cfg, i)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    M,
    C,
    K,
    N,
}

impl SweepAxis {
    fn is_integral(self) -> bool {
        !matches!(self, SweepAxis::C)
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "m" => Ok(SweepAxis::M),
            "c" => Ok(SweepAxis::C),
            "k" => Ok(SweepAxis::K),
            "n" => Ok(SweepAxis::N),
            other => Err(Error::InvalidParameter(format!("unknown sweep axis {other:?}"))),
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepAxis::M => "m",
            SweepAxis::C => "c",
            SweepAxis::K => "k",
            SweepAxis::N => "n",
        })
    }
}

fn as_count(axis: SweepAxis, value: f64) -> Result<usize> {
    if value >= 0.0 && value.fract() == 0.0 && value <= (1u64 << 53) as f64 {
        Ok(value as usize)
    } else {
        Err(Error::InvalidParameter(format!("{axis} must be a nonnegative integer, got {value}")))
    }
}

fn resize_uniform(probs: &mut Vec<f64>, n: usize) -> Result<()> {
    match probs.first() {
        Some(&p) if probs.iter().all(|&q| q == p) => {
            *probs = vec![p; n];
            Ok(())
        }
        _ => Err(Error::InvalidParameter(
            "sweeping n needs the same probability on every coordinate".into(),
        )),
    }
}

/// `cfg` with one parameter replaced.
///
/// * `m`: the sample size.
/// * `c`: the smoothing radius (smoothed distributions only).
/// * `k`: the support becomes `{0, …, k-1}` (parity and random juntas only).
/// * `n`: the dimension; per-coordinate probabilities must all be equal.
pub fn apply_axis(cfg: &TrialConfig, axis: SweepAxis, value: f64) -> Result<TrialConfig> {
    let mut out = cfg.clone();
    match axis {
        SweepAxis::M => out.m = as_count(axis, value)?,
        SweepAxis::C => match &mut out.problem.probs {
            ProbsSpec::Smoothed { c, .. } => *c = value,
            ProbsSpec::Fixed(_) => {
                return Err(Error::InvalidParameter("sweeping c needs a smoothed distribution".into()))
            }
        },
        SweepAxis::K => {
            let support: Vec<usize> = (0..as_count(axis, value)?).collect();
            out.problem.target = match &out.problem.target {
                TargetSpec::Parity { .. } => TargetSpec::Parity { support },
                TargetSpec::RandomJunta { .. } => TargetSpec::RandomJunta { support },
                TargetSpec::Junta { .. } => {
                    return Err(Error::InvalidParameter(
                        "sweeping k needs a parity or random-junta target".into(),
                    ))
                }
            };
        }
        SweepAxis::N => {
            let n = as_count(axis, value)?;
            match &mut out.problem.probs {
                ProbsSpec::Fixed(p) => resize_uniform(p, n)?,
                ProbsSpec::Smoothed { base, .. } => resize_uniform(base, n)?,
            }
            out.problem.n = n;
        }
    }
    out.validate()?;
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub success_rate: Option<f64>,
    pub mean_loss: Option<f64>,
    pub mean_tree_size: Option<f64>,
    pub trials: usize,
    pub error: Option<String>,
}

/// One batch per value. An invalid value yields a row carrying the error.
pub fn run_sweep(cfg: &TrialConfig, axis: SweepAxis, values: &[f64], jobs: usize) -> Vec<SweepRow> {
    values
        .iter()
        .map(|&value| match apply_axis(cfg, axis, value).and_then(|c| run_batch(&c, jobs)) {
            Ok(b) => SweepRow {
                value,
                success_rate: Some(b.success_rate),
                mean_loss: b.mean_loss,
                mean_tree_size: b.mean_tree_size,
                trials: b.trials,
                error: None,
            },
            Err(e) => SweepRow {
                value,
                success_rate: None,
                mean_loss: None,
                mean_tree_size: None,
                trials: 0,
                error: Some(e.to_string()),
            },
        })
        .collect()
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Per-trial rows. Wall time is left out so identical runs give identical
/// bytes.
pub fn write_trials_csv<W: Write>(out: W, results: &[TrialResult]) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "trial",
        "seed",
        "exact_loss",
        "success",
        "tree_size",
        "tree_depth",
        "junta_only",
        "basic_conditions_held",
        "error",
    ])?;
    for r in results {
        w.write_record([
            r.trial.to_string(),
            r.seed.to_string(),
            opt(r.exact_loss),
            r.success.to_string(),
            r.tree_size.to_string(),
            r.tree_depth.to_string(),
            r.junta_only.to_string(),
            opt(r.basic_conditions_held),
            r.error.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()
}

fn format_axis_value(axis: SweepAxis, value: f64) -> String {
    if axis.is_integral() && value.fract() == 0.0 && value.abs() < 1e15 {
        format!("{}", value as i64)
    } else {
        value.to_string()
    }
}

pub fn write_sweep_csv<W: Write>(out: W, axis: SweepAxis, rows: &[SweepRow]) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let axis_name = axis.to_string();
    w.write_record([
        axis_name.as_str(),
        "success_rate",
        "mean_loss",
        "mean_tree_size",
        "trials",
        "error",
    ])?;
    for r in rows {
        w.write_record([
            format_axis_value(axis, r.value),
            opt(r.success_rate),
            opt(r.mean_loss),
            opt(r.mean_tree_size),
            r.trials.to_string(),
            r.error.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()
}

/// Self-contained SVG line chart of success rate against the swept value.
/// The `m` axis is drawn on a log scale when all values are positive.
pub fn sweep_svg(axis: SweepAxis, rows: &[SweepRow]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const LEFT: f64 = 64.0;
    const RIGHT: f64 = 24.0;
    const TOP: f64 = 40.0;
    const BOTTOM: f64 = 56.0;

    let log_x = axis == SweepAxis::M && !rows.is_empty() && rows.iter().all(|r| r.value > 0.0);
    let tx = |v: f64| if log_x { v.log2() } else { v };
    let xs: Vec<f64> = rows.iter().map(|r| tx(r.value)).filter(|v| v.is_finite()).collect();
    let (mut lo, mut hi) = xs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    if !lo.is_finite() {
        (lo, hi) = (0.0, 1.0);
    } else if lo == hi {
        (lo, hi) = (lo - 1.0, hi + 1.0);
    }
    let px = |v: f64| LEFT + (tx(v) - lo) / (hi - lo) * (W - LEFT - RIGHT);
    let py = |rate: f64| TOP + (1.0 - rate) * (H - TOP - BOTTOM);

    let mut svg = String::new();
    let mut line = |s: String| {
        svg.push_str(&s);
        svg.push('\n');
    };
    line(format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    ));
    line(format!(r#"<rect width="{W}" height="{H}" fill="white"/>"#));
    line(format!(
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">success rate vs {axis}</text>"#,
        W / 2.0
    ));
    let (x0, x1, y0, y1) = (LEFT, W - RIGHT, py(0.0), py(1.0));
    line(format!(
        r#"<path d="M{x0} {y1} L{x0} {y0} L{x1} {y0}" fill="none" stroke="black"/>"#
    ));
    for tick in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let y = py(tick);
        line(format!(r##"<line x1="{x0}" y1="{y}" x2="{x1}" y2="{y}" stroke="#ddd"/>"##));
        line(format!(
            r#"<text x="{}" y="{}" text-anchor="end">{tick}</text>"#,
            x0 - 6.0,
            y + 4.0
        ));
    }
    let label_every = rows.len().div_ceil(10).max(1);
    for r in rows.iter().step_by(label_every) {
        let x = px(r.value);
        if x.is_finite() {
            line(format!(
                r#"<text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#,
                y0 + 18.0,
                format_axis_value(axis, r.value)
            ));
        }
    }
    line(format!(
        r#"<text x="{}" y="{}" text-anchor="middle">{axis}{}</text>"#,
        (x0 + x1) / 2.0,
        H - 12.0,
        if log_x { " (log scale)" } else { "" }
    ));

    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.success_rate.map(|s| (px(r.value), py(s))))
        .filter(|(x, _)| x.is_finite())
        .collect();
    if !points.is_empty() {
        let coords: Vec<String> = points.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        line(format!(
            r##"<polyline points="{}" fill="none" stroke="#1f77b4" stroke-width="2"/>"##,
            coords.join(" ")
        ));
        for (x, y) in &points {
            line(format!(r##"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="#1f77b4"/>"##));
        }
    }
    line("</svg>".to_string());
    svg
}

#[derive(Serialize)]
struct ExperimentReport<'a> {
    config: &'a TrialConfig,
    #[serde(flatten)]
    summary: &'a BatchSummary,
}

/// Writes `summary.json` and `trials.csv` into `dir`, creating it if needed.
pub fn write_experiment(dir: &Path, cfg: &TrialConfig, summary: &BatchSummary) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    let report = ExperimentReport { config: cfg, summary };
    let json = serde_json::to_string_pretty(&report).map_err(io::Error::other)?;
    fs::write(dir.join("summary.json"), json + "\n")?;
    write_trials_csv(fs::File::create(dir.join("trials.csv"))?, &summary.results)
}

/// Writes `sweep.csv` and `plot.svg` into `dir`, creating it if needed.
pub fn write_sweep(dir: &Path, axis: SweepAxis, rows: &[SweepRow]) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    write_sweep_csv(fs::File::create(dir.join("sweep.csv"))?, axis, rows)?;
    fs::write(dir.join("plot.svg"), sweep_svg(axis, rows))
}
