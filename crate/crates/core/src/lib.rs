//! Learns discrete Bayesian belief networks from timestamped
//! user-action logs and predicts the most probable next actions, the
//! engine behind an adaptive help module and its evaluation harness.
//!
//! The pipeline: [`event_log`] parses raw interaction logs and builds
//! the transition database; [`bbn`] holds variables, graphs, counts,
//! and conditional probability tables; [`scoring`] ranks structures by
//! Bayesian marginal likelihood and searches structure space;
//! [`inference`] answers exact and Monte Carlo queries; [`ausm`] is the
//! streaming help module; [`eval`] reproduces the cross-validation and
//! replay protocols.
//!
//! The crate is `no_std`-compatible (with `alloc`): disable default
//! features and enable `libm` to build without the standard library.
//! All IO, file handling, and the command-line surface live in the
//! companion CLI crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("either the `std` or the `libm` feature must be enabled");

pub mod ausm;
pub mod bbn;
pub mod eval;
pub mod event_log;
pub mod inference;
pub mod math;
pub mod rng;
pub mod scoring;

pub use ausm::{Ausm, HelpTopicMap, PredictionResult, TransitionSink};
pub use bbn::dataset::{records_to_instances, Dataset, Field, FieldSelection};
pub use bbn::{Dag, Network, PriorConfig, Variable};
pub use event_log::{build_transitions, parse_log, ActionEvent, SessionLog, TransitionRecord};
pub use inference::{posterior_exact, posterior_lw, predict_next, Evidence, Posterior};
pub use scoring::{select_best_structure, ScoredModel, SearchMode};
