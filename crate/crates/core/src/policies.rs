//! The epsilon-greedy family.
//!
//! All four variants share the same mixing rule: with probability `1 - eps_t`
//! play uniformly over the argmax of a per-arm statistic, otherwise play
//! uniformly over all arms. They differ only in which statistic is maximized:
//!
//! * `Plain`: mean observed reward.
//! * `Reweighted`: mean of `r / sqrt(pi)`, where `pi` is the probability the
//!   pulled arm had when it was chosen.
//! * `Optimistic`: mean reward plus `rho * sqrt(ln t / N)`; infinite while
//!   the arm is unpulled.
//! * `Debiased`: mean of `r / pi`.
//!
//! Unpulled arms have statistic 0 under every variant except `Optimistic`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::rng::RandomStream;
use crate::schedules::Schedule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Plain,
    Reweighted,
    Optimistic,
    Debiased,
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant::Plain,
        Variant::Reweighted,
        Variant::Optimistic,
        Variant::Debiased,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::Plain => "plain",
            Variant::Reweighted => "reweighted",
            Variant::Optimistic => "optimistic",
            Variant::Debiased => "debiased",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| {
                Error::InvalidPolicy(format!(
                    "unknown variant `{s}` (expected plain, reweighted, optimistic or debiased)"
                ))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicySpec {
    pub variant: Variant,
    /// Optimism coefficient. Only read by `Optimistic`.
    pub rho: f64,
    pub schedule: Schedule,
}

impl PolicySpec {
    pub fn new(variant: Variant, rho: f64, schedule: Schedule) -> Result<Self> {
        let spec = Self {
            variant,
            rho,
            schedule,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.rho.is_finite() || self.rho < 0.0 {
            return Err(Error::InvalidPolicy(format!(
                "rho must be finite and ≥ 0, got {}",
                self.rho
            )));
        }
        if self.variant == Variant::Optimistic && self.rho <= 0.0 {
            return Err(Error::InvalidPolicy(
                "optimistic variant requires rho > 0".into(),
            ));
        }
        Ok(())
    }
}

/// Running per-arm aggregates.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ArmState {
    pub count: u64,
    pub reward_sum: f64,
    /// Sum of `r / sqrt(pi)`.
    pub reweighted_sum: f64,
    /// Sum of `r / pi`.
    pub debiased_sum: f64,
}

impl ArmState {
    /// Records one pull with reward `reward` chosen at probability `pi_at`.
    ///
    /// Panics if `pi_at` is not in `(0, 1]`.
    #[inline]
    pub fn update(&self, reward: f64, pi_at: f64) -> ArmState {
        assert!(
            pi_at > 0.0 && pi_at <= 1.0,
            "assignment probability must lie in (0, 1], got {pi_at}"
        );
        ArmState {
            count: self.count + 1,
            reward_sum: self.reward_sum + reward,
            reweighted_sum: self.reweighted_sum + reward / pi_at.sqrt(),
            debiased_sum: self.debiased_sum + reward / pi_at,
        }
    }

    /// Rebuilds the aggregates from a log of `(reward, pi)` pairs.
    pub fn from_log(pulls: &[(f64, f64)]) -> ArmState {
        pulls
            .iter()
            .fold(ArmState::default(), |s, &(r, pi)| s.update(r, pi))
    }
}

/// Statistic of `arm` after `t` rounds.
#[inline]
pub fn statistic(arm: &ArmState, variant: Variant, rho: f64, t: u64) -> f64 {
    if arm.count == 0 {
        return match variant {
            Variant::Optimistic => f64::INFINITY,
            _ => 0.0,
        };
    }
    let n = arm.count as f64;
    match variant {
        Variant::Plain => arm.reward_sum / n,
        Variant::Reweighted => arm.reweighted_sum / n,
        Variant::Debiased => arm.debiased_sum / n,
        Variant::Optimistic => {
            let log_t = (t.max(1) as f64).ln();
            arm.reward_sum / n + rho * (log_t / n).sqrt()
        }
    }
}

/// Probability vector over arms for one round.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionProbabilities(Vec<f64>);

impl ActionProbabilities {
    /// Wraps an explicit vector. Entries must be non-negative and sum to 1.
    pub fn from_vec(probs: Vec<f64>) -> Result<Self> {
        let total: f64 = probs.iter().sum();
        if probs.is_empty() || probs.iter().any(|p| !(*p >= 0.0)) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::Precondition(format!(
                "not a probability vector: {probs:?}"
            )));
        }
        Ok(Self(probs))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

/// Mixes exploitation over the argmax of `stats` with uniform exploration at
/// rate `eps`, writing into `out`. Ties use exact equality.
pub fn mix_probabilities(stats: &[f64], eps: f64, out: &mut [f64]) {
    debug_assert_eq!(stats.len(), out.len());
    let k = stats.len() as f64;
    let best = stats.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ties = stats.iter().filter(|&&s| s == best).count() as f64;
    let explore = eps / k;
    let exploit = (1.0 - eps) / ties;
    for (p, &s) in out.iter_mut().zip(stats) {
        *p = if s == best { explore + exploit } else { explore };
    }
}

/// Assignment probabilities at round `t`, from arm states after round `t - 1`.
pub fn action_probabilities(arms: &[ArmState], spec: &PolicySpec, t: u64) -> ActionProbabilities {
    assert!(arms.len() >= 2, "need at least two arms");
    let stats: Vec<f64> = arms
        .iter()
        .map(|a| statistic(a, spec.variant, spec.rho, t.saturating_sub(1)))
        .collect();
    let mut out = vec![0.0; arms.len()];
    mix_probabilities(&stats, spec.schedule.epsilon(t), &mut out);
    ActionProbabilities(out)
}

/// Inverse-CDF draw of an arm index.
#[inline]
pub fn select(probs: &[f64], rng: &mut RandomStream) -> usize {
    let u = rng.uniform();
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            acc += p;
            last_positive = i;
            if u < acc {
                return i;
            }
        }
    }
    // Rounding left the cumulative sum just under u.
    last_positive
}
