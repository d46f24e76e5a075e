//! Simulation toolkit for the fixed-budget thresholding bandit problem.
//!
//! A learner samples `T` times from `K` arms and must then report which arms
//! have a mean above a threshold `tau`, up to a precision `epsilon`. This crate
//! provides:
//!
//! - [`distributions`]: reward models, seeded per-replication streams and the
//!   level-set sample transform,
//! - [`problem`]: gaps, complexity, the loss functional, experiment presets and
//!   the lower-bound instance family,
//! - [`policies`]: APT, uniform allocation, the UCB-E adaptation and CSAR,
//!   plus the game loop,
//! - [`harness`]: Monte-Carlo estimation over horizon grids with
//!   schedule-independent results and CSV/JSON emission.
//!
//! Replications fan out over rayon when the `parallel` feature (on by default)
//! is enabled; without it everything runs on the calling thread with identical
//! results.

pub mod distributions;
pub mod error;
pub mod exec;
pub mod harness;
pub mod policies;
pub mod problem;

pub use distributions::{transform_level_set, ArmKind, ArmModel, SeededRng};
pub use error::{Error, Result};
pub use exec::Execution;
pub use harness::{
    decay_slope_check, estimate_best_arm_error, estimate_error, estimate_pseudo_regret,
    run_experiment, CellEstimate, ExperimentConfig, ExperimentResult, Mode, ProblemSource,
};
pub use policies::{run_game, GameOutcome, Policy, PolicyFactory, PolicyId, RunState};
pub use problem::{
    complexity, gap, loss, lower_bound_family, preset, Family, OutputSet, PresetName,
    ProblemFamily, Threshold, ThresholdProblem,
};
