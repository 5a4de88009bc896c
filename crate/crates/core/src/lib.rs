//! Simulation toolkit for the risk preferences of epsilon-greedy bandit
//! policies.
//!
//! * [`distributions`]: reward laws per arm.
//! * [`schedules`]: exploration rates `eps_t`.
//! * [`policies`]: plain, reweighted, optimistic and debiased epsilon-greedy.
//! * [`advantage_walk`]: the lazy walk behind emergent risk aversion.
//! * [`harness`]: seeded Monte Carlo runs and selection curves.
//! * [`io`]: config files, presets, CSV and SVG.

pub mod advantage_walk;
pub mod distributions;
pub mod error;
pub mod exec;
pub mod harness;
pub mod io;
pub mod policies;
pub mod rng;
pub mod schedules;

pub use distributions::{Law, RewardDistribution};
pub use error::{Error, Result, Violation};
pub use exec::Execution;
pub use harness::{
    compute_ci, run_experiment, run_experiment_with, run_trajectory, ExperimentConfig,
    IntervalMethod, RunResult, SelectionCurve,
};
pub use policies::{ArmState, PolicySpec, Variant};
pub use rng::{Purpose, RandomStream};
pub use schedules::Schedule;
