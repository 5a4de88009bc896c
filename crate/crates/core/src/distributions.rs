//! Reward distributions attached to arms.
//!
//! Every family here is sub-Gaussian. For the bounded and symmetric families
//! the true variance stands in for the variance proxy; for the normal family
//! the two coincide.

use std::fmt;

use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::rng::RandomStream;

/// The parametric family and its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Law {
    /// Deterministic reward `value`.
    PointMass { value: f64 },
    /// Uniform on `[lo, hi]`.
    Uniform { lo: f64, hi: f64 },
    /// `shift + Exp` where the exponential part has the given mean (not rate).
    Exponential { mean: f64, shift: f64 },
    Normal { mean: f64, sd: f64 },
    /// Uniform on `{-1, +1}`.
    Rademacher,
    /// Sum of independent draws from each part.
    Sum { parts: Vec<RewardDistribution> },
}

/// A validated reward law.
#[derive(Debug, Clone, PartialEq)]
pub struct RewardDistribution {
    law: Law,
}

impl RewardDistribution {
    pub fn new(law: Law) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidDistribution(msg));
        match &law {
            Law::PointMass { value } if !value.is_finite() => {
                return bad(format!("point mass value must be finite, got {value}"))
            }
            Law::Uniform { lo, hi } if !(lo.is_finite() && hi.is_finite() && lo < hi) => {
                return bad(format!("uniform requires finite lo < hi, got [{lo}, {hi}]"))
            }
            Law::Exponential { mean, shift } if !(mean.is_finite() && *mean > 0.0) || !shift.is_finite() => {
                return bad(format!(
                    "exponential requires finite mean > 0 and finite shift, got mean {mean}, shift {shift}"
                ))
            }
            Law::Normal { mean, sd } if !(mean.is_finite() && sd.is_finite() && *sd >= 0.0) => {
                return bad(format!("normal requires finite mean and sd >= 0, got N({mean}, {sd})"))
            }
            Law::Sum { parts } if parts.is_empty() => {
                return bad("sum needs at least one part".into())
            }
            _ => {}
        }
        Ok(Self { law })
    }

    pub fn point(value: f64) -> Result<Self> {
        Self::new(Law::PointMass { value })
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        Self::new(Law::Uniform { lo, hi })
    }

    pub fn exponential(mean: f64, shift: f64) -> Result<Self> {
        Self::new(Law::Exponential { mean, shift })
    }

    pub fn normal(mean: f64, sd: f64) -> Result<Self> {
        Self::new(Law::Normal { mean, sd })
    }

    pub fn rademacher() -> Self {
        Self {
            law: Law::Rademacher,
        }
    }

    pub fn sum(parts: Vec<RewardDistribution>) -> Result<Self> {
        Self::new(Law::Sum { parts })
    }

    pub fn law(&self) -> &Law {
        &self.law
    }

    /// One draw. Advances `rng`.
    pub fn sample(&self, rng: &mut RandomStream) -> f64 {
        match &self.law {
            Law::PointMass { value } => *value,
            Law::Uniform { lo, hi } => {
                let x = lo + (hi - lo) * rng.uniform();
                x.min(*hi)
            }
            Law::Exponential { mean, shift } => {
                let e: f64 = Exp1.sample(rng);
                shift + mean * e
            }
            Law::Normal { mean, sd } => {
                let z: f64 = StandardNormal.sample(rng);
                mean + sd * z
            }
            Law::Rademacher => {
                if rng.uniform() < 0.5 {
                    -1.0
                } else {
                    1.0
                }
            }
            Law::Sum { parts } => parts.iter().map(|p| p.sample(rng)).sum(),
        }
    }

    pub fn mean(&self) -> f64 {
        match &self.law {
            Law::PointMass { value } => *value,
            Law::Uniform { lo, hi } => 0.5 * (lo + hi),
            Law::Exponential { mean, shift } => mean + shift,
            Law::Normal { mean, .. } => *mean,
            Law::Rademacher => 0.0,
            Law::Sum { parts } => parts.iter().map(Self::mean).sum(),
        }
    }

    /// Exact variance, used as the variance proxy.
    pub fn variance(&self) -> f64 {
        match &self.law {
            Law::PointMass { .. } => 0.0,
            Law::Uniform { lo, hi } => (hi - lo).powi(2) / 12.0,
            Law::Exponential { mean, .. } => mean * mean,
            Law::Normal { sd, .. } => sd * sd,
            Law::Rademacher => 1.0,
            Law::Sum { parts } => parts.iter().map(Self::variance).sum(),
        }
    }

    pub fn is_deterministic(&self) -> bool {
        self.variance() == 0.0
    }
}

impl fmt::Display for RewardDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.law {
            Law::PointMass { value } => write!(f, "1{{{value}}}"),
            Law::Uniform { lo, hi } => write!(f, "U[{lo}, {hi}]"),
            Law::Exponential { mean, shift } if *shift == 0.0 => write!(f, "Exp(mean {mean})"),
            Law::Exponential { mean, shift } => write!(f, "{shift} + Exp(mean {mean})"),
            Law::Normal { mean, sd } => write!(f, "N({mean}, {sd}²)"),
            Law::Rademacher => write!(f, "Rademacher"),
            Law::Sum { parts } => {
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" + ")?;
                    }
                    write!(f, "{p}")?;
                }
                Ok(())
            }
        }
    }
}
