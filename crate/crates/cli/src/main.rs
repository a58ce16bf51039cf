use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use id3_juntas::fourier::{coordinate_split, fourier_coeffs, normalize_shifted, restrict_target, MultilinearPolynomial};
use id3_juntas::harness::{write_experiment, write_sweep};
use id3_juntas::oracle::is_pure;
use id3_juntas::rng::{derive_seed, stream};
use id3_juntas::{
    exact_gain, exact_i, exact_label_prob, exact_tree_loss, id3_learn, run_batch, run_sweep, sample_dataset,
    verify_basic_conditions, Dataset, DecisionTree, Impurity, LearnerPolicy, PartialAssignment, ProbsSpec,
    ProblemSpec, SweepAxis, TieBreak, TrialConfig,
};

#[derive(Parser)]
#[command(name = "id3j", version, about = "ID3 decision trees on boolean product distributions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Learn a tree from a dataset file or from a sample of a configured problem.
    Learn(LearnArgs),
    /// Exact label probabilities, I statistics and gains of a problem.
    Oracle(OracleArgs),
    /// Fourier expansion of the (restricted) target and its split on a coordinate.
    Fourier(FourierArgs),
    /// Run a batch of seeded trials and write summary.json and trials.csv.
    Experiment(ExperimentArgs),
    /// Run one batch per value of a parameter and write sweep.csv and plot.svg.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct Common {
    /// JSON config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed; overrides the config's.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Args)]
struct LearnArgs {
    #[command(flatten)]
    common: Common,
    /// Dataset in the `n=<n> m=<m>` text format.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Sample size when sampling from the config.
    #[arg(long)]
    m: Option<usize>,
    /// Candidate features, comma separated (default: all).
    #[arg(long, value_delimiter = ',')]
    features: Option<Vec<usize>>,
    #[arg(long)]
    impurity: Option<Impurity>,
    #[arg(long)]
    tie_break: Option<TieBreak>,
    /// Print the tree as JSON instead of indented text.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    common: Common,
    /// Restriction such as `1*0*`; all coordinates free by default.
    #[arg(long)]
    w: Option<String>,
    /// Report only this feature.
    #[arg(long)]
    i: Option<usize>,
    #[arg(long, default_value_t = Impurity::Gini)]
    impurity: Impurity,
    /// Margin asked of every free support coordinate.
    #[arg(long, default_value_t = 1e-9)]
    epsilon: f64,
    /// Skip the check over all restrictions of the support.
    #[arg(long)]
    skip_basic: bool,
    /// Include the per-restriction details of that check.
    #[arg(long)]
    subcubes: bool,
}

#[derive(Args)]
struct FourierArgs {
    #[command(flatten)]
    common: Common,
    /// Restriction of support coordinates such as `1*0*`.
    #[arg(long)]
    w: Option<String>,
    /// Split on this (global) support coordinate.
    #[arg(long)]
    i: Option<usize>,
    /// Smoothing radius for the normalized polynomial; defaults to the config's.
    #[arg(long)]
    c: Option<f64>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[command(flatten)]
    common: Common,
    /// Overrides the config's trial count.
    #[arg(long)]
    trials: Option<usize>,
    /// Overrides the config's sample size.
    #[arg(long)]
    m: Option<usize>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Parameter to vary: m, c, k or n.
    #[arg(long)]
    axis: SweepAxis,
    /// Comma separated values; may be empty.
    #[arg(long, allow_hyphen_values = true, default_value = "")]
    values: String,
    #[arg(long)]
    trials: Option<usize>,
}

/// Bad input: unreadable or malformed config, invalid flags or parameters.
#[derive(Debug)]
struct ConfigError(String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn config_err(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

fn checked<T>(r: id3_juntas::Result<T>) -> Result<T> {
    r.map_err(|e| config_err(e.to_string()))
}

fn read_config(common: &Common) -> Result<String> {
    let path = common.config.as_ref().ok_or_else(|| config_err("--config is required"))?;
    fs::read_to_string(path).map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))
}

fn load_trial_config(common: &Common) -> Result<TrialConfig> {
    let mut cfg = checked(TrialConfig::from_json(&read_config(common)?))?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn load_problem(common: &Common) -> Result<ProblemSpec> {
    checked(ProblemSpec::from_json(&read_config(common)?))
}

fn parse_w(w: Option<&str>, n: usize) -> Result<PartialAssignment> {
    match w {
        None => Ok(PartialAssignment::free(n)),
        Some(s) => {
            let w = checked(PartialAssignment::parse(s))?;
            if w.len() != n {
                return Err(config_err(format!("--w has {} coordinates, the problem has {n}", w.len())));
            }
            Ok(w)
        }
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
}

fn tree_json(tree: &DecisionTree) -> Result<String> {
    Ok(serde_json::to_string_pretty(tree)? + "\n")
}

fn learn(args: LearnArgs) -> Result<()> {
    let common = &args.common;
    let mut report = serde_json::Map::new();
    let (tree, sampled) = if let Some(path) = &args.data {
        let text = fs::read_to_string(path).map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        let s = checked(Dataset::from_text(&text))?;
        let policy = LearnerPolicy {
            impurity: args.impurity.unwrap_or_default(),
            tie_break: args.tie_break.unwrap_or_default(),
            ..LearnerPolicy::default()
        };
        let features = args.features.clone().unwrap_or_else(|| (0..s.n()).collect());
        let tree = checked(id3_learn(&s, &features, &policy, common.seed.unwrap_or(0)))?;
        let errors = (0..s.len())
            .map(|r| s.example(r))
            .filter(|ex| !tree.evaluate(&ex.bits).is_ok_and(|y| y == ex.label))
            .count();
        report.insert("training_errors".into(), json!(errors));
        if common.config.is_some() {
            let problem = load_problem(common)?;
            if problem.n != s.n() {
                return Err(config_err(format!("dataset has n={}, config has n={}", s.n(), problem.n)));
            }
            let (d, f) = checked(problem.resolve(common.seed.unwrap_or(0)))?;
            report.insert("exact_loss".into(), json!(checked(exact_tree_loss(&d, &f, &tree))?));
        }
        (tree, None)
    } else {
        let mut cfg = load_trial_config(common)?;
        if let Some(m) = args.m {
            cfg.m = m;
        }
        if let Some(imp) = args.impurity {
            cfg.policy.impurity = imp;
        }
        if let Some(tb) = args.tie_break {
            cfg.policy.tie_break = tb;
        }
        checked(cfg.validate())?;
        // Same draws as trial 0 of an experiment with this config.
        let (d, f) = checked(cfg.instance(0))?;
        let s = checked(sample_dataset(&d, &f, cfg.m, derive_seed(cfg.seed, stream::SAMPLE)))?;
        let features = args.features.clone().unwrap_or_else(|| (0..cfg.n()).collect());
        let tree = checked(id3_learn(&s, &features, &cfg.policy, derive_seed(cfg.seed, stream::LEARNER)))?;
        report.insert("exact_loss".into(), json!(checked(exact_tree_loss(&d, &f, &tree))?));
        report.insert("probs".into(), json!(d.probs()));
        report.insert("support".into(), json!(f.support()));
        (tree, Some(s))
    };
    report.insert("size".into(), json!(tree.size()));
    report.insert("depth".into(), json!(tree.depth()));
    report.insert("features".into(), json!(tree.features()));

    if args.json {
        print!("{}", tree_json(&tree)?);
    } else {
        print!("{}", tree.to_text());
    }
    eprintln!("{}", Value::Object(report.clone()));
    if let Some(dir) = &common.out {
        write_file(dir, "tree.json", &tree_json(&tree)?)?;
        write_file(dir, "tree.txt", &tree.to_text())?;
        write_file(dir, "learn.json", &(serde_json::to_string_pretty(&report)? + "\n"))?;
        if let Some(s) = sampled {
            write_file(dir, "dataset.txt", &s.to_text())?;
        }
    }
    Ok(())
}

fn oracle(args: OracleArgs) -> Result<()> {
    let common = &args.common;
    let problem = load_problem(common)?;
    let (d, f) = checked(problem.resolve(common.seed.unwrap_or(0)))?;
    let n = problem.n;
    let w = parse_w(args.w.as_deref(), n)?;
    let features: Vec<usize> = match args.i {
        Some(i) => vec![i],
        None => (0..n).filter(|&i| w.is_free(i)).collect(),
    };
    let mut per_feature = Vec::new();
    for i in features {
        per_feature.push(json!({
            "i": i,
            "in_support": f.in_support(i),
            "I": checked(exact_i(&d, &f, &w, i))?,
            "gain": checked(exact_gain(&d, &f, &w, i, args.impurity))?,
        }));
    }
    let mut out = json!({
        "probs": d.probs(),
        "support": f.support(),
        "w": w.to_string(),
        "impurity": args.impurity,
        "label_prob": checked(exact_label_prob(&d, &f, &w))?,
        "pure": checked(is_pure(&d, &f, &w))?,
        "features": per_feature,
    });
    if !args.skip_basic {
        let report = checked(verify_basic_conditions(&d, &f, args.impurity, args.epsilon))?;
        let mut basic = serde_json::to_value(&report)?;
        if !args.subcubes {
            basic.as_object_mut().expect("object").remove("subcubes");
        }
        out["basic_conditions"] = basic;
    }
    let text = serde_json::to_string_pretty(&out)? + "\n";
    print!("{text}");
    if let Some(dir) = &common.out {
        write_file(dir, "oracle.json", &text)?;
    }
    Ok(())
}

/// Nonzero terms of `p`, with local variables mapped to global coordinates.
fn terms(p: &MultilinearPolynomial, coords: &[usize]) -> Value {
    let list: Vec<Value> = p
        .coeffs
        .iter()
        .enumerate()
        .filter(|(_, &a)| a != 0.0)
        .map(|(mask, &a)| {
            let set: Vec<usize> = (0..p.arity).filter(|t| mask >> t & 1 == 1).map(|t| coords[t]).collect();
            json!({"set": set, "coeff": a})
        })
        .collect();
    Value::Array(list)
}

fn fourier(args: FourierArgs) -> Result<()> {
    let common = &args.common;
    let problem = load_problem(common)?;
    let seed = common.seed.unwrap_or(0);
    let f = checked(problem.target(seed))?;
    let w = parse_w(args.w.as_deref(), problem.n)?;
    let restricted = checked(restrict_target(&f, &w))?;
    let expansion = checked(fourier_coeffs(&restricted.table))?;
    let poly = expansion.to_polynomial();
    let mut out = json!({
        "support": f.support(),
        "w": w.to_string(),
        "coords": restricted.coords,
        "degree": poly.degree(),
        "parseval": expansion.coeffs.iter().map(|a| a * a).sum::<f64>(),
        "coefficients": terms(&poly, &restricted.coords),
    });
    if let Some(i) = args.i {
        let (base, spec_c) = match &problem.probs {
            ProbsSpec::Fixed(p) => (p.clone(), None),
            ProbsSpec::Smoothed { base, c, .. } => (base.clone(), Some(*c)),
        };
        let split = checked(coordinate_split(&f, &w, i, &base))?;
        let coords = &split.restricted.coords;
        let mut s = json!({
            "coordinate": i,
            "base": coords.iter().map(|&t| base[t]).collect::<Vec<_>>(),
            "g": terms(&split.g, coords),
            "h": terms(&split.h, coords),
            "g0": terms(&split.g0, coords),
        });
        if let Some(c) = args.c.or(spec_c).filter(|&c| c > 0.0) {
            s["c"] = json!(c);
            s["normalized"] = normalize_shifted(&split.g0, c).map_or(Value::Null, |p| terms(&p, coords));
        }
        out["split"] = s;
    }
    let text = serde_json::to_string_pretty(&out)? + "\n";
    print!("{text}");
    if let Some(dir) = &common.out {
        write_file(dir, "fourier.json", &text)?;
    }
    Ok(())
}

fn out_dir(common: &Common) -> PathBuf {
    common.out.clone().unwrap_or_else(|| PathBuf::from("out"))
}

fn experiment(args: ExperimentArgs) -> Result<()> {
    let mut cfg = load_trial_config(&args.common)?;
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    if let Some(m) = args.m {
        cfg.m = m;
    }
    let summary = checked(run_batch(&cfg, args.common.jobs))?;
    let dir = out_dir(&args.common);
    write_experiment(&dir, &cfg, &summary).with_context(|| format!("writing results to {}", dir.display()))?;
    println!(
        "success_rate={} ({}/{}) mean_loss={} mean_tree_size={} errors={} -> {}",
        summary.success_rate,
        summary.successes,
        summary.trials,
        summary.mean_loss.map_or("-".into(), |x| x.to_string()),
        summary.mean_tree_size.map_or("-".into(), |x| x.to_string()),
        summary.errors,
        dir.display()
    );
    Ok(())
}

fn parse_values(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| v.parse::<f64>().map_err(|_| config_err(format!("sweep value {v:?} is not a number"))))
        .collect()
}

fn sweep(args: SweepArgs) -> Result<()> {
    let mut cfg = load_trial_config(&args.common)?;
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    checked(cfg.validate())?;
    let values = parse_values(&args.values)?;
    let rows = run_sweep(&cfg, args.axis, &values, args.common.jobs);
    let dir = out_dir(&args.common);
    write_sweep(&dir, args.axis, &rows).with_context(|| format!("writing results to {}", dir.display()))?;
    for r in &rows {
        match (&r.error, r.success_rate) {
            (Some(e), _) => println!("{}={}: error: {e}", args.axis, r.value),
            (None, Some(rate)) => println!("{}={}: success_rate={rate}", args.axis, r.value),
            (None, None) => {}
        }
    }
    println!("{} rows -> {}", rows.len(), dir.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Learn(a) => learn(a),
        Command::Oracle(a) => oracle(a),
        Command::Fourier(a) => fourier(a),
        Command::Experiment(a) => experiment(a),
        Command::Sweep(a) => sweep(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.downcast_ref::<ConfigError>().is_some() => {
            eprintln!("config error: {e:#}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
