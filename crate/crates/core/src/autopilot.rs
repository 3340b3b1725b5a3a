//! Simulated IMU and PID heading hold.

use std::f64::consts::{PI, TAU};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dynamics::BodyState;
use crate::error::{Result, SimError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ImuModel {
    #[serde(rename = "gyro_noise_std_rad_s")]
    pub gyro_noise_std: f64,
    #[serde(rename = "heading_noise_std_rad")]
    pub heading_noise_std: f64,
    pub seed: u64,
}

impl Default for ImuModel {
    fn default() -> Self {
        Self {
            gyro_noise_std: 0.002,
            heading_noise_std: 0.003,
            seed: 7,
        }
    }
}

impl ImuModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.gyro_noise_std >= 0.0 && self.gyro_noise_std.is_finite()) {
            return Err(SimError::param("gyro_noise_std", "must be non-negative"));
        }
        if !(self.heading_noise_std >= 0.0 && self.heading_noise_std.is_finite()) {
            return Err(SimError::param("heading_noise_std", "must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImuSample {
    pub heading: f64,
    pub yaw_rate: f64,
}

/// Heading and yaw rate with Gaussian noise. The noise for a given `tick`
/// comes from its own ChaCha stream, so a sample depends only on
/// `(seed, tick)` and the state.
pub fn imu_sample(state: &BodyState, imu: &ImuModel, tick: u64) -> ImuSample {
    let mut rng = ChaCha8Rng::seed_from_u64(imu.seed);
    rng.set_stream(tick);
    let n_heading: f64 = StandardNormal.sample(&mut rng);
    let n_rate: f64 = StandardNormal.sample(&mut rng);
    ImuSample {
        heading: wrap_to_pi(state.heading() + imu.heading_noise_std * n_heading),
        yaw_rate: state.ang_vel.z + imu.gyro_noise_std * n_rate,
    }
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_to_pi(angle: f64) -> f64 {
    let wrapped = angle - TAU * ((angle + PI) / TAU).floor();
    if wrapped <= -PI {
        wrapped + TAU
    } else if wrapped > PI {
        wrapped - TAU
    } else {
        wrapped
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PidGains {
    #[serde(rename = "kp_per_rad")]
    pub kp: f64,
    #[serde(rename = "ki_per_rad_s")]
    pub ki: f64,
    #[serde(rename = "kd_s_per_rad")]
    pub kd: f64,
    /// Bound on `|ki * integral|`.
    pub integral_limit: f64,
}

impl Default for PidGains {
    fn default() -> Self {
        Self {
            kp: 1.6,
            ki: 0.05,
            kd: 3.0,
            integral_limit: 0.3,
        }
    }
}

impl PidGains {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("kp", self.kp), ("ki", self.ki), ("kd", self.kd)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(SimError::param(name, "must be non-negative"));
            }
        }
        if !(self.integral_limit > 0.0 && self.integral_limit.is_finite()) {
            return Err(SimError::param("integral_limit", "must be positive"));
        }
        Ok(())
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            kp: self.kp * factor,
            ki: self.ki * factor,
            kd: self.kd * factor,
            integral_limit: self.integral_limit,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PidState {
    pub integral: f64,
    pub prev_error: f64,
}

/// One heading-hold update; returns the yaw command and the next state.
///
/// The derivative acts on the measured yaw rate. Integration is skipped while
/// the output is saturated in the direction of the error.
pub fn pid_step(
    gains: &PidGains,
    st: &PidState,
    setpoint: f64,
    measured: f64,
    yaw_rate: f64,
    dt: f64,
) -> Result<(f64, PidState)> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(SimError::param("dt", "must be positive"));
    }
    let error = wrap_to_pi(setpoint - measured);
    let law = |integral: f64| gains.kp * error + gains.ki * integral - gains.kd * yaw_rate;

    let mut integral = st.integral + error * dt;
    if gains.ki > 0.0 {
        let bound = gains.integral_limit / gains.ki;
        integral = integral.clamp(-bound, bound);
    }
    let candidate = law(integral);
    if candidate.abs() > 1.0 && candidate.signum() == error.signum() {
        integral = st.integral;
    }
    let output = law(integral).clamp(-1.0, 1.0);
    Ok((
        output,
        PidState {
            integral,
            prev_error: error,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::UnitQuaternion;

    #[test]
    fn noiseless_imu_is_exact() {
        let imu = ImuModel { gyro_noise_std: 0.0, heading_noise_std: 0.0, seed: 1 };
        let state = BodyState {
            attitude: UnitQuaternion::from_euler_angles(0.0, 0.0, 1.2),
            ang_vel: nalgebra::Vector3::new(0.0, 0.0, 0.3),
            ..BodyState::default()
        };
        let s = imu_sample(&state, &imu, 99);
        assert!((s.heading - 1.2).abs() < 1e-12);
        assert_eq!(s.yaw_rate, 0.3);
        assert_eq!(imu_sample(&BodyState::default(), &imu, 0).heading, 0.0);
    }

    #[test]
    fn imu_noise_is_reproducible_per_tick() {
        let imu = ImuModel::default();
        let state = BodyState::default();
        assert_eq!(imu_sample(&state, &imu, 7), imu_sample(&state, &imu, 7));
        assert_ne!(imu_sample(&state, &imu, 7), imu_sample(&state, &imu, 8));
    }

    #[test]
    fn wrap_is_half_open() {
        assert_eq!(wrap_to_pi(PI), PI);
        assert_eq!(wrap_to_pi(-PI), PI);
        assert!((wrap_to_pi(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_to_pi(0.5 + TAU) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn equilibrium_outputs_zero() {
        let (u, _) = pid_step(&PidGains::default(), &PidState::default(), 0.3, 0.3, 0.0, 1e-3).unwrap();
        assert_eq!(u, 0.0);
    }

    #[test]
    fn error_takes_the_short_way_round() {
        let gains = PidGains { kp: 1.0, ki: 0.0, kd: 0.0, integral_limit: 1.0 };
        let (u, st) =
            pid_step(&gains, &PidState::default(), PI - 0.1, -PI + 0.1, 0.0, 1e-3).unwrap();
        assert!((st.prev_error + 0.2).abs() < 1e-12);
        assert!((u + 0.2).abs() < 1e-12);
    }

    #[test]
    fn proportional_only() {
        let gains = PidGains { kp: 1.0, ki: 0.0, kd: 0.0, integral_limit: 1.0 };
        let (u, _) = pid_step(&gains, &PidState::default(), 0.5, 0.0, 0.0, 1e-3).unwrap();
        assert!((u - 0.5).abs() < 1e-15);
    }

    #[test]
    fn integration_pauses_while_saturated() {
        let gains = PidGains { kp: 10.0, ki: 1.0, kd: 0.0, integral_limit: 0.5 };
        let st = PidState { integral: 0.1, prev_error: 0.0 };
        let (u, next) = pid_step(&gains, &st, 1.0, 0.0, 0.0, 0.01).unwrap();
        assert_eq!(u, 1.0);
        assert_eq!(next.integral, 0.1);
    }

    #[test]
    fn rejects_non_positive_dt() {
        assert!(pid_step(&PidGains::default(), &PidState::default(), 0.0, 0.0, 0.0, 0.0).is_err());
    }
}
