//! Exploration-rate schedules `eps_t = max(floor, min(1, c * t^-p))`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    coefficient: f64,
    exponent: f64,
    floor: f64,
}

impl Schedule {
    pub fn new(coefficient: f64, exponent: f64, floor: f64) -> Result<Self> {
        if !(coefficient.is_finite() && coefficient > 0.0) {
            return Err(Error::InvalidSchedule(format!(
                "coefficient must be > 0, got {coefficient}"
            )));
        }
        if !(exponent.is_finite() && exponent >= 0.0) {
            return Err(Error::InvalidSchedule(format!(
                "exponent must be ≥ 0, got {exponent}"
            )));
        }
        if !(0.0..=1.0).contains(&floor) {
            return Err(Error::InvalidSchedule(format!(
                "floor must lie in [0, 1], got {floor}"
            )));
        }
        Ok(Self {
            coefficient,
            exponent,
            floor,
        })
    }

    /// `eps_t = t^-p` with no floor.
    pub fn power(exponent: f64) -> Result<Self> {
        Self::new(1.0, exponent, 0.0)
    }

    /// Reading of the risk-neutrality condition for the reweighted policy:
    /// `eps_t = t^-(1/2 - kappa)`, `kappa` in `(0, 1/2)`.
    pub fn from_kappa(kappa: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa < 0.5) {
            return Err(Error::InvalidSchedule(format!(
                "kappa must lie in (0, 1/2), got {kappa}"
            )));
        }
        Self::power(0.5 - kappa)
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    /// Exploration rate at round `t` (1-indexed).
    #[inline]
    pub fn epsilon(&self, t: u64) -> f64 {
        debug_assert!(t >= 1, "rounds are 1-indexed");
        let t = t.max(1) as f64;
        let raw = if self.exponent == 0.0 {
            self.coefficient
        } else {
            self.coefficient * t.powf(-self.exponent)
        };
        raw.min(1.0).max(self.floor)
    }
}
