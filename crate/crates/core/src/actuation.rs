//! Twelve geared DC motors on six parallel-wired driver channels.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::geometry::{ArmMount, ARM_COUNT, PAIR_COUNT};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MotorParams {
    /// No-load shaft speed at full duty.
    #[serde(rename = "omega_max_rad_s")]
    pub omega_max: f64,
    #[serde(rename = "time_constant_s")]
    pub time_constant: f64,
}

impl Default for MotorParams {
    fn default() -> Self {
        Self {
            omega_max: 31.4,
            time_constant: 0.15,
        }
    }
}

impl MotorParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega_max > 0.0 && self.omega_max.is_finite()) {
            return Err(SimError::param("omega_max", "must be positive"));
        }
        if !(self.time_constant > 0.0 && self.time_constant.is_finite()) {
            return Err(SimError::param("time_constant", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MotorState {
    pub omega: f64,
}

/// Signed duty per driver channel, each clamped to `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PairDuties([f64; PAIR_COUNT]);

impl PairDuties {
    /// Clamps every channel into `[-1, 1]`. NaN maps to 0.
    pub fn new(duties: [f64; PAIR_COUNT]) -> Self {
        PairDuties(duties.map(clamp_duty))
    }

    pub fn zero() -> Self {
        PairDuties([0.0; PAIR_COUNT])
    }

    pub fn as_array(&self) -> &[f64; PAIR_COUNT] {
        &self.0
    }
}

fn clamp_duty(d: f64) -> f64 {
    if d.is_nan() {
        0.0
    } else {
        d.clamp(-1.0, 1.0)
    }
}

/// Per-arm duties: both arms of a pair always see the pair's channel.
pub fn expand_pairs(duties: &PairDuties, mounts: &[ArmMount]) -> [f64; ARM_COUNT] {
    let mut out = [0.0; ARM_COUNT];
    for m in mounts {
        out[m.index] = duties.0[m.pair_id];
    }
    out
}

/// Exact discretisation of `tau * omega' = duty * omega_max - omega`.
pub fn motor_step(state: MotorState, duty: f64, p: &MotorParams, dt: f64) -> Result<MotorState> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(SimError::param("dt", "must be positive"));
    }
    let target = clamp_duty(duty) * p.omega_max;
    let blend = -(-dt / p.time_constant).exp_m1();
    Ok(MotorState {
        omega: state.omega + (target - state.omega) * blend,
    })
}
