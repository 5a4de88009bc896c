//! Monte Carlo experiment engine.
//!
//! A trajectory plays one policy against one bandit instance for `horizon`
//! rounds and snapshots its state at each checkpoint. An experiment runs
//! `runs` seeded trajectories and reduces them, in run-index order, into a
//! [`SelectionCurve`]: the fraction of runs that chose each arm at each
//! checkpoint, with a confidence interval.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::distributions::{Law, RewardDistribution};
use crate::error::{Error, Result, Violation};
use crate::exec::Execution;
use crate::policies::{mix_probabilities, select, statistic, ArmState, PolicySpec, Variant};
use crate::rng::{Purpose, RandomStream};

pub const DEFAULT_HORIZON: u64 = 100_000;
pub const DEFAULT_RUNS: u64 = 100;
pub const DEFAULT_CONFIDENCE: f64 = 0.90;

/// How per-checkpoint confidence intervals are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IntervalMethod {
    /// `p ± z sqrt(p(1-p)/n)`, clipped to `[0, 1]`.
    #[default]
    Normal,
    Wilson,
}

impl IntervalMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            IntervalMethod::Normal => "normal",
            IntervalMethod::Wilson => "wilson",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub label: String,
    pub arms: Vec<RewardDistribution>,
    /// Display names, one per arm.
    pub arm_labels: Vec<String>,
    pub policy: PolicySpec,
    pub horizon: u64,
    pub runs: u64,
    /// Strictly increasing rounds in `1..=horizon`.
    pub checkpoints: Vec<u64>,
    pub master_seed: u64,
    pub interval: IntervalMethod,
    pub confidence: f64,
}

impl ExperimentConfig {
    /// A config with default horizon, run count, checkpoint grid and seed.
    pub fn new(label: impl Into<String>, arms: Vec<RewardDistribution>, policy: PolicySpec) -> Self {
        let arm_labels = arms.iter().map(|a| a.to_string()).collect();
        Self {
            label: label.into(),
            arms,
            arm_labels,
            policy,
            horizon: DEFAULT_HORIZON,
            runs: DEFAULT_RUNS,
            checkpoints: log_checkpoints(DEFAULT_HORIZON),
            master_seed: 0,
            interval: IntervalMethod::Normal,
            confidence: DEFAULT_CONFIDENCE,
        }
    }

    /// Sets the horizon and resets checkpoints to the default grid.
    pub fn with_horizon(mut self, horizon: u64) -> Self {
        self.horizon = horizon;
        self.checkpoints = log_checkpoints(horizon);
        self
    }

    pub fn with_runs(mut self, runs: u64) -> Self {
        self.runs = runs;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.arms.len() < 2 {
            out.push(Violation::new("arms", "at least two arms are required"));
        }
        if self.arm_labels.len() != self.arms.len() {
            out.push(Violation::new(
                "arm_labels",
                format!(
                    "expected {} labels, got {}",
                    self.arms.len(),
                    self.arm_labels.len()
                ),
            ));
        }
        if self.horizon == 0 {
            out.push(Violation::new("horizon", "horizon must be ≥ 1"));
        }
        if self.runs == 0 {
            out.push(Violation::new("runs", "runs must be ≥ 1"));
        }
        if self.checkpoints.is_empty() {
            out.push(Violation::new("checkpoints", "at least one checkpoint is required"));
        } else {
            if self.checkpoints[0] == 0 {
                out.push(Violation::new("checkpoints", "checkpoints must be ≥ 1"));
            }
            if self.checkpoints.windows(2).any(|w| w[0] >= w[1]) {
                out.push(Violation::new("checkpoints", "checkpoints must be strictly increasing"));
            }
            if self.checkpoints.last().copied().unwrap_or(0) > self.horizon {
                out.push(Violation::new("checkpoints", "last checkpoint exceeds the horizon"));
            }
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            out.push(Violation::new("confidence", "confidence level must lie in (0, 1)"));
        }
        if let Err(e) = self.policy.validate() {
            out.push(Violation::new("policy", e.to_string()));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(v))
        }
    }

    pub fn arm_count(&self) -> usize {
        self.arms.len()
    }
}

/// `{1, 2, 5} x 10^k` up to `horizon`, with `horizon` itself appended.
pub fn log_checkpoints(horizon: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut scale = 1u64;
    'outer: loop {
        for m in [1, 2, 5] {
            let Some(t) = scale.checked_mul(m) else { break 'outer };
            if t > horizon {
                break 'outer;
            }
            out.push(t);
        }
        match scale.checked_mul(10) {
            Some(s) => scale = s,
            None => break,
        }
    }
    if out.last() != Some(&horizon) && horizon > 0 {
        out.push(horizon);
    }
    out
}

/// One simulated round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub t: u64,
    pub arm: usize,
    pub reward: f64,
    /// Exact probability the chosen arm had.
    pub pi: f64,
}

/// A single seeded trajectory, advanced one round at a time.
pub struct Trajectory<'a> {
    cfg: &'a ExperimentConfig,
    arms: Vec<ArmState>,
    t: u64,
    cumulative_reward: f64,
    selection: RandomStream,
    rewards: RandomStream,
    stats: Vec<f64>,
    probs: Vec<f64>,
}

impl<'a> Trajectory<'a> {
    pub fn new(cfg: &'a ExperimentConfig, run_index: u64) -> Self {
        let k = cfg.arms.len();
        Self {
            cfg,
            arms: vec![ArmState::default(); k],
            t: 0,
            cumulative_reward: 0.0,
            selection: RandomStream::derive(cfg.master_seed, run_index, Purpose::Selection),
            rewards: RandomStream::derive(cfg.master_seed, run_index, Purpose::Rewards),
            stats: vec![0.0; k],
            probs: vec![0.0; k],
        }
    }

    /// Rounds played so far.
    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn arms(&self) -> &[ArmState] {
        &self.arms
    }

    pub fn cumulative_reward(&self) -> f64 {
        self.cumulative_reward
    }

    /// Assignment probabilities used in the most recent round.
    pub fn last_probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn step(&mut self) -> Step {
        let t = self.t + 1;
        let policy = &self.cfg.policy;
        for (s, a) in self.stats.iter_mut().zip(&self.arms) {
            *s = statistic(a, policy.variant, policy.rho, t - 1);
        }
        mix_probabilities(&self.stats, policy.schedule.epsilon(t), &mut self.probs);
        let arm = select(&self.probs, &mut self.selection);
        let pi = self.probs[arm];
        let reward = self.cfg.arms[arm].sample(&mut self.rewards);
        self.arms[arm] = self.arms[arm].update(reward, pi);
        self.cumulative_reward += reward;
        self.t = t;
        Step { t, arm, reward, pi }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: u64,
    /// Arm played at round `t`.
    pub chosen: usize,
    /// Pull counts after round `t`.
    pub counts: Vec<u64>,
    pub cumulative_reward: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub run_index: u64,
    /// One entry per checkpoint, in checkpoint order.
    pub snapshots: Vec<Snapshot>,
}

/// Plays run `run_index` to the horizon. Deterministic in `(master_seed, run_index)`.
pub fn run_trajectory(cfg: &ExperimentConfig, run_index: u64) -> RunResult {
    let mut traj = Trajectory::new(cfg, run_index);
    let mut snapshots = Vec::with_capacity(cfg.checkpoints.len());
    let mut next = cfg.checkpoints.iter().copied().peekable();
    while let Some(&cp) = next.peek() {
        let step = loop {
            let s = traj.step();
            if s.t == cp {
                break s;
            }
        };
        snapshots.push(Snapshot {
            t: cp,
            chosen: step.arm,
            counts: traj.arms().iter().map(|a| a.count).collect(),
            cumulative_reward: traj.cumulative_reward(),
        });
        next.next();
    }
    RunResult {
        run_index,
        snapshots,
    }
}

pub fn run_all(cfg: &ExperimentConfig, exec: Execution) -> Vec<RunResult> {
    exec.map_runs(cfg.runs, |i| run_trajectory(cfg, i))
}

/// Per-arm selection frequencies at each checkpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionCurve {
    pub label: String,
    pub arm_labels: Vec<String>,
    pub checkpoints: Vec<u64>,
    pub runs: u64,
    /// `p_hat[checkpoint][arm]`.
    pub p_hat: Vec<Vec<f64>>,
    pub ci_lo: Vec<Vec<f64>>,
    pub ci_hi: Vec<Vec<f64>>,
    /// Mean of `N_a(t) / t` across runs.
    pub cum_share: Vec<Vec<f64>>,
}

impl SelectionCurve {
    pub fn arm_count(&self) -> usize {
        self.arm_labels.len()
    }

    pub fn final_index(&self) -> usize {
        self.checkpoints.len() - 1
    }

    /// Index of checkpoint `t`, if present.
    pub fn checkpoint_index(&self, t: u64) -> Option<usize> {
        self.checkpoints.binary_search(&t).ok()
    }

    pub fn half_width(&self, cp: usize, arm: usize) -> f64 {
        0.5 * (self.ci_hi[cp][arm] - self.ci_lo[cp][arm])
    }

    /// `p_hat` of `arm` at every checkpoint.
    pub fn arm_curve(&self, arm: usize) -> Vec<f64> {
        self.p_hat.iter().map(|row| row[arm]).collect()
    }

    pub fn final_p_hat(&self, arm: usize) -> f64 {
        self.p_hat[self.final_index()][arm]
    }
}

/// Reduces run results (in the order given) into a selection curve.
pub fn aggregate(cfg: &ExperimentConfig, runs: &[RunResult]) -> Result<SelectionCurve> {
    if runs.is_empty() {
        return Err(Error::Precondition("no runs to aggregate".into()));
    }
    let k = cfg.arms.len();
    let n = runs.len() as u64;
    let mut p_hat = Vec::with_capacity(cfg.checkpoints.len());
    let mut ci_lo = Vec::with_capacity(cfg.checkpoints.len());
    let mut ci_hi = Vec::with_capacity(cfg.checkpoints.len());
    let mut cum_share = Vec::with_capacity(cfg.checkpoints.len());
    for (c, &t) in cfg.checkpoints.iter().enumerate() {
        let mut chosen = vec![0u64; k];
        let mut share = vec![0.0; k];
        for run in runs {
            let snap = &run.snapshots[c];
            debug_assert_eq!(snap.t, t);
            chosen[snap.chosen] += 1;
            for (s, &count) in share.iter_mut().zip(&snap.counts) {
                *s += count as f64 / t as f64;
            }
        }
        let mut lo = Vec::with_capacity(k);
        let mut hi = Vec::with_capacity(k);
        for &s in &chosen {
            let (l, h) = match cfg.interval {
                IntervalMethod::Normal => compute_ci(s, n, cfg.confidence),
                IntervalMethod::Wilson => wilson_ci(s, n, cfg.confidence),
            };
            lo.push(l);
            hi.push(h);
        }
        p_hat.push(chosen.iter().map(|&s| s as f64 / n as f64).collect());
        ci_lo.push(lo);
        ci_hi.push(hi);
        cum_share.push(share.into_iter().map(|s| s / n as f64).collect());
    }
    Ok(SelectionCurve {
        label: cfg.label.clone(),
        arm_labels: cfg.arm_labels.clone(),
        checkpoints: cfg.checkpoints.clone(),
        runs: n,
        p_hat,
        ci_lo,
        ci_hi,
        cum_share,
    })
}

pub fn run_experiment_with(cfg: &ExperimentConfig, exec: Execution) -> Result<SelectionCurve> {
    cfg.validate()?;
    aggregate(cfg, &run_all(cfg, exec))
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<SelectionCurve> {
    run_experiment_with(cfg, Execution::default())
}

fn z_score(level: f64) -> f64 {
    Normal::standard().inverse_cdf(0.5 + 0.5 * level)
}

/// Normal-approximation interval for a binomial proportion, clipped to `[0, 1]`.
pub fn compute_ci(successes: u64, n: u64, level: f64) -> (f64, f64) {
    assert!(n >= 1 && successes <= n, "need 0 <= successes <= n, n >= 1");
    let p = successes as f64 / n as f64;
    let half = z_score(level) * (p * (1.0 - p) / n as f64).sqrt();
    ((p - half).max(0.0), (p + half).min(1.0))
}

/// Wilson score interval.
pub fn wilson_ci(successes: u64, n: u64, level: f64) -> (f64, f64) {
    assert!(n >= 1 && successes <= n, "need 0 <= successes <= n, n >= 1");
    let z = z_score(level);
    let n = n as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Selection frequency curve of an arm whose mean is strictly below the best.
pub fn dominated_arm_frequency(
    cfg: &ExperimentConfig,
    dominated_index: usize,
    exec: Execution,
) -> Result<Vec<f64>> {
    let arm = cfg.arms.get(dominated_index).ok_or_else(|| {
        Error::Precondition(format!("arm {dominated_index} does not exist"))
    })?;
    let best = cfg
        .arms
        .iter()
        .map(RewardDistribution::mean)
        .fold(f64::NEG_INFINITY, f64::max);
    if arm.mean() >= best {
        return Err(Error::InvalidConfig(vec![Violation::new(
            format!("arms[{dominated_index}]"),
            format!(
                "arm mean {} is not strictly below the best mean {best}",
                arm.mean()
            ),
        )]));
    }
    Ok(run_experiment_with(cfg, exec)?.arm_curve(dominated_index))
}

/// Sample variance across runs of `Y_t / sqrt(t)`, where `Y_t` is the risky
/// arm's reweighted reward sum after `t` rounds.
///
/// Requires the reweighted variant on two arms, one of them a point mass at 0.
pub fn reweighted_variance_check(cfg: &ExperimentConfig, t: u64, exec: Execution) -> Result<f64> {
    if cfg.policy.variant != Variant::Reweighted {
        return Err(Error::Precondition("variance check needs the reweighted variant".into()));
    }
    if cfg.arms.len() != 2 {
        return Err(Error::Precondition("variance check needs exactly two arms".into()));
    }
    let is_zero = |d: &RewardDistribution| matches!(d.law(), Law::PointMass { value } if *value == 0.0);
    let risky = if is_zero(&cfg.arms[0]) {
        1
    } else if is_zero(&cfg.arms[1]) {
        0
    } else {
        return Err(Error::Precondition(
            "variance check needs one arm that is a point mass at 0".into(),
        ));
    };
    if t == 0 || cfg.runs < 2 {
        return Err(Error::Precondition("need t >= 1 and at least two runs".into()));
    }
    let scaled = exec.map_runs(cfg.runs, |i| {
        let mut traj = Trajectory::new(cfg, i);
        for _ in 0..t {
            traj.step();
        }
        traj.arms()[risky].reweighted_sum / (t as f64).sqrt()
    });
    let n = scaled.len() as f64;
    let mean = scaled.iter().sum::<f64>() / n;
    Ok(scaled.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / (n - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedules::Schedule;

    fn two_arm(a: RewardDistribution, b: RewardDistribution, variant: Variant, p: f64) -> ExperimentConfig {
        let rho = if variant == Variant::Optimistic { 2.0 } else { 0.0 };
        let policy = PolicySpec::new(variant, rho, Schedule::power(p).unwrap()).unwrap();
        ExperimentConfig::new("test", vec![a, b], policy)
    }

    fn point(v: f64) -> RewardDistribution {
        RewardDistribution::point(v).unwrap()
    }

    #[test]
    fn log_grid() {
        assert_eq!(log_checkpoints(1), vec![1]);
        assert_eq!(log_checkpoints(30), vec![1, 2, 5, 10, 20, 30]);
        assert_eq!(log_checkpoints(100), vec![1, 2, 5, 10, 20, 50, 100]);
        let g = log_checkpoints(100_000);
        assert_eq!(g.len(), 16);
        assert_eq!(*g.last().unwrap(), 100_000);
    }

    #[test]
    fn ci_examples() {
        let (lo, hi) = compute_ci(70, 100, 0.90);
        assert!((lo - 0.6246).abs() < 5e-5 && (hi - 0.7754).abs() < 5e-5, "{lo} {hi}");
        assert_eq!(compute_ci(0, 100, 0.90), (0.0, 0.0));
        let (lo, hi) = compute_ci(50, 100, 0.90);
        assert!((lo - 0.4178).abs() < 5e-5 && (hi - 0.5822).abs() < 5e-5);
        assert!((z_score(0.90) - 1.6449).abs() < 1e-4);
    }

    #[test]
    fn ci_half_width_bounded() {
        for n in 1..40 {
            for s in 0..=n {
                for f in [compute_ci, wilson_ci] {
                    let (lo, hi) = f(s, n, 0.9);
                    assert!(lo >= 0.0 && hi <= 1.0 && lo <= hi);
                    assert!(0.5 * (hi - lo) <= 0.5);
                }
            }
        }
    }

    #[test]
    fn wilson_contains_estimate() {
        let (lo, hi) = wilson_ci(0, 100, 0.9);
        assert!(lo.abs() < 1e-12);
        assert!(hi > 0.0 && hi < 0.05);
    }

    #[test]
    fn validation_collects_every_problem() {
        let mut cfg = two_arm(point(0.0), point(0.0), Variant::Plain, 1.0);
        cfg.arms.pop();
        cfg.arm_labels.pop();
        cfg.runs = 0;
        cfg.checkpoints = vec![5, 3, 200_000];
        let v = cfg.violations();
        let keys: Vec<_> = v.iter().map(|x| x.key.as_str()).collect();
        assert!(keys.contains(&"arms") && keys.contains(&"runs"));
        assert_eq!(keys.iter().filter(|k| **k == "checkpoints").count(), 2);
    }

    #[test]
    fn replay_is_identical() {
        let cfg = two_arm(point(0.0), RewardDistribution::uniform(-1.0, 1.0).unwrap(), Variant::Reweighted, 0.49)
            .with_horizon(5_000)
            .with_seed(99);
        assert_eq!(run_trajectory(&cfg, 7), run_trajectory(&cfg, 7));
        assert_ne!(run_trajectory(&cfg, 7), run_trajectory(&cfg, 8));
    }

    #[test]
    fn counts_conserved_at_every_checkpoint() {
        let cfg = two_arm(point(0.0), RewardDistribution::uniform(-1.0, 1.0).unwrap(), Variant::Optimistic, 1.0)
            .with_horizon(10_000)
            .with_runs(20);
        for run in run_all(&cfg, Execution::Sequential) {
            for s in &run.snapshots {
                assert_eq!(s.counts.iter().sum::<u64>(), s.t);
            }
        }
    }

    #[test]
    fn symmetric_point_masses_split_evenly() {
        let cfg = two_arm(point(0.0), point(0.0), Variant::Plain, 1.0)
            .with_horizon(1_000)
            .with_runs(100)
            .with_seed(3);
        let runs = run_all(&cfg, Execution::Parallel);
        let share: f64 = runs
            .iter()
            .map(|r| r.snapshots.last().unwrap().counts[0] as f64 / 1000.0)
            .sum::<f64>()
            / 100.0;
        assert!((share - 0.5).abs() <= 0.1, "{share}");
    }

    #[test]
    fn dominant_point_mass_wins() {
        let cfg = two_arm(point(1.0), point(0.0), Variant::Plain, 1.0)
            .with_horizon(10_000)
            .with_seed(11);
        let runs = run_all(&cfg, Execution::Parallel);
        let wins = runs
            .iter()
            .filter(|r| r.snapshots.last().unwrap().chosen == 0)
            .count();
        assert!(wins >= 95, "{wins}");
    }

    #[test]
    fn single_run_curve_is_degenerate() {
        let cfg = two_arm(point(0.0), RewardDistribution::uniform(-1.0, 1.0).unwrap(), Variant::Plain, 1.0)
            .with_horizon(1_000)
            .with_runs(1);
        let curve = run_experiment(&cfg).unwrap();
        for (c, row) in curve.p_hat.iter().enumerate() {
            assert_eq!(row.iter().sum::<f64>(), 1.0);
            for (a, &p) in row.iter().enumerate() {
                assert!(p == 0.0 || p == 1.0);
                assert_eq!(curve.half_width(c, a), 0.0);
            }
        }
    }

    #[test]
    fn dominated_frequency_requires_a_dominated_arm() {
        let cfg = two_arm(point(0.0), point(0.0), Variant::Plain, 1.0).with_horizon(10);
        let err = dominated_arm_frequency(&cfg, 0, Execution::Sequential).unwrap_err();
        assert!(matches!(err, Error::InvalidConfig(_)));
        assert!(dominated_arm_frequency(&cfg, 5, Execution::Sequential).is_err());
    }

    #[test]
    fn variance_check_degenerate_arm() {
        let cfg = two_arm(point(0.0), point(0.0), Variant::Reweighted, 0.49).with_runs(10);
        assert_eq!(reweighted_variance_check(&cfg, 100, Execution::Sequential).unwrap(), 0.0);
        let plain = two_arm(point(0.0), point(0.0), Variant::Plain, 0.49);
        assert!(reweighted_variance_check(&plain, 100, Execution::Sequential).is_err());
    }
}
