//! ID3 decision trees on boolean product distributions.
//!
//! The crate pairs a sample-driven ID3 learner with exact oracles for junta
//! targets, so learned trees can be scored by their true loss instead of a
//! test-set estimate. Around that core sit Fourier tools for restricted
//! juntas, samplers for product and smoothed distributions, and a seeded
//! experiment harness.
//!
//! ```
//! use id3_juntas::{
//!     exact_tree_loss, id3_learn, sample_dataset, LearnerPolicy, ProductDistribution, TargetFunction,
//! };
//!
//! let d = ProductDistribution::constant(8, 0.75).unwrap();
//! let f = TargetFunction::parity(8, vec![0, 1]).unwrap();
//! let s = sample_dataset(&d, &f, 4096, 7).unwrap();
//! let tree = id3_learn(&s, &(0..8).collect::<Vec<_>>(), &LearnerPolicy::default(), 0).unwrap();
//! assert_eq!(exact_tree_loss(&d, &f, &tree).unwrap(), 0.0);
//! ```

pub mod assignment;
pub mod bits;
pub mod config;
pub mod dataset;
pub mod distributions;
pub mod error;
pub mod fourier;
pub mod harness;
pub mod impurity;
pub mod learner;
pub mod oracle;
pub mod product;
pub mod rng;
pub mod target;
pub mod tree;

pub use assignment::PartialAssignment;
pub use bits::BitVec;
pub use config::{ProbsSpec, ProblemSpec, TargetSpec};
pub use dataset::{Dataset, Example};
pub use distributions::{random_junta, sample_dataset, smoothed_distribution, SmoothingSpec};
pub use error::{Error, Result};
pub use fourier::{fourier_coeffs, FourierExpansion, MultilinearPolynomial};
pub use harness::{run_batch, run_sweep, run_trial, BatchSummary, SweepAxis, TrialConfig, TrialResult};
pub use impurity::Impurity;
pub use learner::{empirical_gain, empirical_i, id3_learn, LearnerPolicy, TieBreak};
pub use oracle::{exact_gain, exact_i, exact_label_prob, exact_tree_loss, verify_basic_conditions};
pub use product::ProductDistribution;
pub use target::TargetFunction;
pub use tree::DecisionTree;
