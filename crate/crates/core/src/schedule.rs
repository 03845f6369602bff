//! Size thresholds separating large from small squares.
//!
//! The boundaries follow `P_0 = 1`, `P_1 = base`, `P_i = P_{i-1}^growth`.
//! With `base = eps^6` and `growth = 6` this is `P_i = eps^(6^i)`, the
//! default. Those values are astronomically small for any useful `eps`, so
//! tests and benchmarks use scaled schedules such as `base = 1/4, growth = 3`
//! which keep the same shape (a wide gap between consecutive boundaries).
//!
//! With `delta = P_{i-1}` (the smallest large side when class `i` is
//! dropped), the slack terms are `delta^4 / eps^2` for the near-full test
//! used by dissection and `delta^4 / eps` for the greedy append guarantee.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleError {
    #[error("epsilon must lie in (0, 1), got {0}")]
    EpsilonOutOfRange(Scalar),
    #[error("schedule base must lie in (0, 1), got {0}")]
    BaseOutOfRange(Scalar),
    #[error("schedule growth must be at least 2, got {0}")]
    GrowthTooSmall(u32),
}

/// Optional schedule override as it appears in instance files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    pub base: Scalar,
    pub growth: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdSchedule {
    epsilon: Scalar,
    base: Scalar,
    growth: u32,
}

/// Boundaries whose encoding grows past this many bits are not materialized.
const MAX_BOUNDARY_BITS: u64 = 1 << 22;

impl ThresholdSchedule {
    /// `P_i = eps^(6^i)`.
    pub fn paper(epsilon: Scalar) -> Result<Self, ScheduleError> {
        check_epsilon(&epsilon)?;
        let base = epsilon.pow(6);
        Ok(ThresholdSchedule { epsilon, base, growth: 6 })
    }

    pub fn scaled(epsilon: Scalar, base: Scalar, growth: u32) -> Result<Self, ScheduleError> {
        check_epsilon(&epsilon)?;
        if !base.is_positive() || base >= Scalar::one() {
            return Err(ScheduleError::BaseOutOfRange(base));
        }
        if growth < 2 {
            return Err(ScheduleError::GrowthTooSmall(growth));
        }
        Ok(ThresholdSchedule { epsilon, base, growth })
    }

    pub fn from_spec(epsilon: Scalar, spec: Option<&ScheduleSpec>) -> Result<Self, ScheduleError> {
        match spec {
            Some(s) => Self::scaled(epsilon, s.base.clone(), s.growth),
            None => Self::paper(epsilon),
        }
    }

    pub fn spec(&self) -> ScheduleSpec {
        ScheduleSpec { base: self.base.clone(), growth: self.growth }
    }

    pub fn epsilon(&self) -> &Scalar {
        &self.epsilon
    }

    pub fn base(&self) -> &Scalar {
        &self.base
    }

    pub fn growth(&self) -> u32 {
        self.growth
    }

    /// k = ceil(1/eps): number of boundaries; there are k + 1 classes.
    pub fn k(&self) -> usize {
        self.epsilon.recip().ceil_u64() as usize
    }

    /// `P_0 ..= P_upto` (clamped to `k`). Stops early, returning fewer
    /// values, once a boundary would exceed the materialization limit.
    pub fn boundaries(&self, upto: usize) -> Vec<Scalar> {
        let upto = upto.min(self.k());
        let mut out = Vec::with_capacity(upto + 1);
        out.push(Scalar::one());
        let mut cur = self.base.clone();
        for i in 1..=upto {
            if i > 1 {
                if cur.bit_size().saturating_mul(self.growth as u64) > MAX_BOUNDARY_BITS {
                    break;
                }
                cur = cur.pow(self.growth);
            }
            out.push(cur.clone());
        }
        out
    }

    /// `P_i`, if it can be materialized.
    pub fn boundary(&self, i: usize) -> Option<Scalar> {
        if i > self.k() {
            return None;
        }
        self.boundaries(i).get(i).cloned()
    }

    /// Sides strictly above this are large when class `i` is dropped.
    pub fn large_min_side(&self, i: usize) -> Option<Scalar> {
        self.boundary(i.saturating_sub(1))
    }

    /// Sides at most this are small when class `i` is dropped.
    pub fn small_max_side(&self, i: usize) -> Option<Scalar> {
        if i > self.k() {
            return Some(Scalar::zero());
        }
        self.boundary(i)
    }

    /// `delta^4 / eps^2`: a placement of large squares is "near full" when
    /// it covers at least `h` minus this.
    pub fn rest_area_slack(&self, i: usize) -> Option<Scalar> {
        let delta = self.large_min_side(i)?;
        Some(delta.pow(4) / self.epsilon.square())
    }

    /// `delta^4 / eps`: total area bound under which all small squares can be
    /// appended next to the large ones.
    pub fn fact_slack(&self, i: usize) -> Option<Scalar> {
        let delta = self.large_min_side(i)?;
        Some(delta.pow(4) / &self.epsilon)
    }

    /// `eps < 1 / (2h + 2h^2)` for a bin of height `h` (width 1).
    pub fn epsilon_guard_holds(&self, height: &Scalar) -> bool {
        let bound = (Scalar::from_int(2) * height + Scalar::from_int(2) * height.square()).recip();
        self.epsilon < bound
    }
}

fn check_epsilon(epsilon: &Scalar) -> Result<(), ScheduleError> {
    if !epsilon.is_positive() || *epsilon >= Scalar::one() {
        return Err(ScheduleError::EpsilonOutOfRange(epsilon.clone()));
    }
    Ok(())
}
