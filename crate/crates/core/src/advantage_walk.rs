//! The advantage walk.
//!
//! Against a deterministic arm paying 0, plain epsilon-greedy on two arms is
//! driven entirely by the risky arm's cumulative reward `X_t`. That sum is a
//! lazy random walk from 0 which moves (by a fresh reward draw) with
//! probability `1 - eps/2` when `X_t > 0`, `1/2` when `X_t = 0` and `eps/2`
//! when `X_t < 0`. Because it moves freely above zero and barely moves
//! below, it piles up on the negative side, which is where the preference
//! for the safe arm comes from.

use crate::distributions::RewardDistribution;
use crate::exec::Execution;
use crate::rng::{Purpose, RandomStream};
use crate::schedules::Schedule;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkState {
    pub position: f64,
    /// Steps taken.
    pub t: u64,
    /// Latest step `t'` with `X_{t'-1} <= 0 <= X_{t'}`, or 0 if none.
    pub last_crossing: u64,
}

impl Default for WalkState {
    fn default() -> Self {
        Self::new()
    }
}

impl WalkState {
    pub fn new() -> Self {
        Self {
            position: 0.0,
            t: 0,
            last_crossing: 0,
        }
    }

    /// Steps since the last upward crossing of zero.
    pub fn tau(&self) -> u64 {
        self.t - self.last_crossing
    }

    /// One step of the lazy kernel at exploration rate `eps`.
    pub fn step(&self, inc: &RewardDistribution, eps: f64, rng: &mut RandomStream) -> WalkState {
        let moves = rng.uniform() < move_probability(self.position, eps);
        let position = if moves {
            self.position + inc.sample(rng)
        } else {
            self.position
        };
        let t = self.t + 1;
        let last_crossing = if self.position <= 0.0 && position >= 0.0 {
            t
        } else {
            self.last_crossing
        };
        WalkState {
            position,
            t,
            last_crossing,
        }
    }
}

/// Probability that the walk moves from `position` at exploration rate `eps`.
#[inline]
pub fn move_probability(position: f64, eps: f64) -> f64 {
    if position > 0.0 {
        1.0 - 0.5 * eps
    } else if position == 0.0 {
        0.5
    } else {
        0.5 * eps
    }
}

/// Free function form of [`WalkState::step`].
pub fn walk_step(w: &WalkState, inc: &RewardDistribution, eps: f64, rng: &mut RandomStream) -> WalkState {
    w.step(inc, eps, rng)
}

/// Exploration rate driving the walk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WalkSchedule {
    Fixed(f64),
    /// `eps_t` from the schedule at step `t` (1-indexed).
    Decaying(Schedule),
}

impl WalkSchedule {
    #[inline]
    pub fn epsilon(&self, t: u64) -> f64 {
        match self {
            WalkSchedule::Fixed(e) => *e,
            WalkSchedule::Decaying(s) => s.epsilon(t),
        }
    }
}

/// Monte Carlo estimate of `P[Y_1, ..., Y_t > 0]` for the plain (non-lazy)
/// walk with increments `inc`, started at 0.
pub fn survival_probability(
    inc: &RewardDistribution,
    t: u64,
    runs: u64,
    seed: u64,
    exec: Execution,
) -> f64 {
    assert!(t >= 1 && runs >= 1);
    let survived = exec.map_runs(runs, |run| {
        let mut rng = RandomStream::derive(seed, run, Purpose::Survival);
        let mut y = 0.0;
        for _ in 0..t {
            y += inc.sample(&mut rng);
            if y <= 0.0 {
                return false;
            }
        }
        true
    });
    survived.iter().filter(|&&s| s).count() as f64 / runs as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Occupation {
    pub fraction_positive: f64,
    pub fraction_nonpositive: f64,
}

/// Fraction of steps `1..=horizon` with `X_t > 0` for each run.
pub fn positive_fractions(
    inc: &RewardDistribution,
    schedule: WalkSchedule,
    horizon: u64,
    runs: u64,
    seed: u64,
    exec: Execution,
) -> Vec<f64> {
    assert!(horizon >= 1);
    exec.map_runs(runs, |run| {
        let mut rng = RandomStream::derive(seed, run, Purpose::Walk);
        let mut w = WalkState::new();
        let mut positive = 0u64;
        for t in 1..=horizon {
            w = w.step(inc, schedule.epsilon(t), &mut rng);
            if w.position > 0.0 {
                positive += 1;
            }
        }
        positive as f64 / horizon as f64
    })
}

/// Average occupation of `X_t > 0` and `X_t <= 0` across runs.
pub fn occupation_fractions(
    inc: &RewardDistribution,
    schedule: WalkSchedule,
    horizon: u64,
    runs: u64,
    seed: u64,
    exec: Execution,
) -> Occupation {
    let per_run = positive_fractions(inc, schedule, horizon, runs, seed, exec);
    let fraction_positive = per_run.iter().sum::<f64>() / runs as f64;
    Occupation {
        fraction_positive,
        fraction_nonpositive: 1.0 - fraction_positive,
    }
}

/// Visits and moves, binned by the sign of the pre-step position:
/// index 0 is negative, 1 is zero, 2 is positive.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct KernelTally {
    pub visits: [u64; 3],
    pub moves: [u64; 3],
}

impl KernelTally {
    pub fn move_frequency(&self, bin: usize) -> Option<f64> {
        (self.visits[bin] > 0).then(|| self.moves[bin] as f64 / self.visits[bin] as f64)
    }

    fn merge(mut self, other: KernelTally) -> KernelTally {
        for i in 0..3 {
            self.visits[i] += other.visits[i];
            self.moves[i] += other.moves[i];
        }
        self
    }
}

fn sign_bin(x: f64) -> usize {
    if x < 0.0 {
        0
    } else if x == 0.0 {
        1
    } else {
        2
    }
}

/// Empirical move counts of the lazy walk at a fixed `eps`.
pub fn kernel_tally(
    inc: &RewardDistribution,
    eps: f64,
    horizon: u64,
    runs: u64,
    seed: u64,
    exec: Execution,
) -> KernelTally {
    exec.map_runs(runs, |run| {
        let mut rng = RandomStream::derive(seed, run, Purpose::Walk);
        let mut w = WalkState::new();
        let mut tally = KernelTally::default();
        for _ in 0..horizon {
            let next = w.step(inc, eps, &mut rng);
            let bin = sign_bin(w.position);
            tally.visits[bin] += 1;
            // A move can land on the same value only for point-mass-at-0 increments.
            if next.position != w.position {
                tally.moves[bin] += 1;
            }
            w = next;
        }
        tally
    })
    .into_iter()
    .fold(KernelTally::default(), KernelTally::merge)
}

/// Cross-run summary of the walk at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkCheckpoint {
    pub t: u64,
    pub p_positive: f64,
    pub p_zero: f64,
    pub p_negative: f64,
    pub mean_tau: f64,
}

/// Sign distribution and mean `tau` across runs at each checkpoint.
pub fn sign_profile(
    inc: &RewardDistribution,
    schedule: WalkSchedule,
    checkpoints: &[u64],
    runs: u64,
    seed: u64,
    exec: Execution,
) -> Vec<WalkCheckpoint> {
    let per_run: Vec<Vec<WalkState>> = exec.map_runs(runs, |run| {
        let mut rng = RandomStream::derive(seed, run, Purpose::Walk);
        let mut w = WalkState::new();
        let mut out = Vec::with_capacity(checkpoints.len());
        for &cp in checkpoints {
            while w.t < cp {
                w = w.step(inc, schedule.epsilon(w.t + 1), &mut rng);
            }
            out.push(w);
        }
        out
    });
    let n = runs as f64;
    checkpoints
        .iter()
        .enumerate()
        .map(|(c, &t)| {
            let mut bins = [0u64; 3];
            let mut tau = 0.0;
            for states in &per_run {
                bins[sign_bin(states[c].position)] += 1;
                tau += states[c].tau() as f64;
            }
            WalkCheckpoint {
                t,
                p_positive: bins[2] as f64 / n,
                p_zero: bins[1] as f64 / n,
                p_negative: bins[0] as f64 / n,
                mean_tau: tau / n,
            }
        })
        .collect()
}
