//! Six-degree-of-freedom hull dynamics.
//!
//! Velocities live in the body frame (x forward, z up), pose in the world
//! frame (z up). The hull is treated as a rigid body with diagonal added
//! mass, diagonal linear plus quadratic damping, and a restoring wrench from
//! weight at the center of mass and buoyancy at the center of buoyancy.

use nalgebra::{Matrix3, UnitQuaternion, Vector3, Vector6};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::geometry::{ArmMount, ARM_COUNT};
use crate::hydro::{arm_wrench, PreparedThrust, WrenchBody};

/// Largest step `integrate_step` accepts.
pub const MAX_DT: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodyState {
    /// World frame, meters.
    pub position: Vector3<f64>,
    /// Body to world rotation.
    pub attitude: UnitQuaternion<f64>,
    /// Body frame, m/s.
    pub lin_vel: Vector3<f64>,
    /// Body frame, rad/s.
    pub ang_vel: Vector3<f64>,
}

impl Default for BodyState {
    fn default() -> Self {
        Self {
            position: Vector3::zeros(),
            attitude: UnitQuaternion::identity(),
            lin_vel: Vector3::zeros(),
            ang_vel: Vector3::zeros(),
        }
    }
}

impl BodyState {
    /// Yaw angle about world z in `(-π, π]`; zero for the identity attitude.
    pub fn heading(&self) -> f64 {
        let q = self.attitude.quaternion();
        let (w, x, y, z) = (q.w, q.i, q.j, q.k);
        let yaw = (2.0 * (w * z + x * y)).atan2(1.0 - 2.0 * (y * y + z * z));
        if yaw == -std::f64::consts::PI {
            std::f64::consts::PI
        } else {
            yaw
        }
    }

    /// Roll, pitch, yaw (ZYX convention), radians.
    pub fn euler_angles(&self) -> (f64, f64, f64) {
        self.attitude.euler_angles()
    }

    pub fn is_finite(&self) -> bool {
        self.position
            .iter()
            .chain(self.lin_vel.iter())
            .chain(self.ang_vel.iter())
            .chain(self.attitude.coords.iter())
            .all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RobotParams {
    #[serde(rename = "dry_mass_kg")]
    pub dry_mass: f64,
    #[serde(rename = "ballast_mass_kg")]
    pub ballast_mass: f64,
    #[serde(rename = "displaced_volume_m3")]
    pub displaced_volume: f64,
    /// Center of buoyancy relative to the center of mass, body frame.
    #[serde(rename = "r_cob_m")]
    pub r_cob: [f64; 3],
    #[serde(rename = "inertia_kg_m2")]
    pub inertia: [[f64; 3]; 3],
    /// Diagonal added mass: surge, sway, heave (kg) then roll, pitch, yaw (kg·m²).
    #[serde(rename = "added_mass_kg_and_kg_m2")]
    pub added_mass: [f64; 6],
    /// N·s/m for translation, N·m·s for rotation.
    #[serde(rename = "drag_linear_n_s_per_m_and_n_m_s")]
    pub drag_linear: [f64; 6],
    /// N·s²/m² for translation, N·m·s² for rotation.
    #[serde(rename = "drag_quadratic_n_s2_per_m2_and_n_m_s2")]
    pub drag_quadratic: [f64; 6],
    #[serde(rename = "fluid_density_kg_m3")]
    pub fluid_density: f64,
    #[serde(rename = "gravity_m_s2")]
    pub gravity: f64,
}

/// Total adjusted mass at which the real robot hovered.
pub const TRIMMED_TOTAL_MASS: f64 = 11.25;
/// Fresh water.
pub const FRESH_WATER_DENSITY: f64 = 998.0;

impl Default for RobotParams {
    fn default() -> Self {
        let rigid_inertia = 0.13;
        Self {
            dry_mass: 6.25,
            ballast_mass: 5.0,
            displaced_volume: TRIMMED_TOTAL_MASS / FRESH_WATER_DENSITY,
            r_cob: [0.0, 0.0, 0.02],
            inertia: [
                [rigid_inertia, 0.0, 0.0],
                [0.0, rigid_inertia, 0.0],
                [0.0, 0.0, rigid_inertia],
            ],
            added_mass: [
                0.5 * TRIMMED_TOTAL_MASS,
                0.5 * TRIMMED_TOTAL_MASS,
                0.5 * TRIMMED_TOTAL_MASS,
                0.5 * rigid_inertia,
                0.5 * rigid_inertia,
                0.5 * rigid_inertia,
            ],
            drag_linear: [3.0, 3.0, 3.0, 0.05, 0.05, 0.05],
            drag_quadratic: [20.0, 20.0, 20.0, 0.05, 0.05, 0.05],
            fluid_density: FRESH_WATER_DENSITY,
            gravity: 9.81,
        }
    }
}

impl RobotParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("dry_mass", self.dry_mass),
            ("displaced_volume", self.displaced_volume),
            ("fluid_density", self.fluid_density),
            ("gravity", self.gravity),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(SimError::param(name, "must be positive"));
            }
        }
        if !(self.ballast_mass >= 0.0 && self.ballast_mass.is_finite()) {
            return Err(SimError::param("ballast_mass", "must be non-negative"));
        }
        if !self.r_cob.iter().all(|v| v.is_finite()) {
            return Err(SimError::param("r_cob", "must be finite"));
        }
        let inertia = self.inertia_matrix();
        if (inertia - inertia.transpose()).norm() > 1e-12 * inertia.norm()
            || inertia.cholesky().is_none()
        {
            return Err(SimError::param("inertia", "must be symmetric positive definite"));
        }
        if !self.added_mass.iter().all(|v| *v >= 0.0 && v.is_finite()) {
            return Err(SimError::param("added_mass", "must be non-negative"));
        }
        let drag_ok = self
            .drag_linear
            .iter()
            .chain(self.drag_quadratic.iter())
            .all(|v| *v >= 0.0 && v.is_finite());
        if !drag_ok {
            return Err(SimError::param("drag", "coefficients must be non-negative"));
        }
        Ok(())
    }

    pub fn total_mass(&self) -> f64 {
        self.dry_mass + self.ballast_mass
    }

    pub fn inertia_matrix(&self) -> Matrix3<f64> {
        Matrix3::from_fn(|r, c| self.inertia[r][c])
    }

    pub fn r_cob(&self) -> Vector3<f64> {
        Vector3::from(self.r_cob)
    }

    /// Rigid plus added translational mass per body axis.
    pub fn effective_mass(&self) -> Vector3<f64> {
        let m = self.total_mass();
        Vector3::new(
            m + self.added_mass[0],
            m + self.added_mass[1],
            m + self.added_mass[2],
        )
    }

    /// Rigid plus added rotational inertia.
    pub fn effective_inertia(&self) -> Matrix3<f64> {
        self.inertia_matrix()
            + Matrix3::from_diagonal(&Vector3::new(
                self.added_mass[3],
                self.added_mass[4],
                self.added_mass[5],
            ))
    }

    pub fn buoyancy(&self) -> f64 {
        self.fluid_density * self.gravity * self.displaced_volume
    }

    pub fn weight(&self) -> f64 {
        self.total_mass() * self.gravity
    }

    /// Kinetic energy including the entrained fluid.
    pub fn kinetic_energy(&self, state: &BodyState) -> f64 {
        let m = self.effective_mass();
        let v = state.lin_vel;
        let w = state.ang_vel;
        0.5 * v.component_mul(&m).dot(&v) + 0.5 * w.dot(&(self.effective_inertia() * w))
    }
}

/// Weight at the center of mass plus buoyancy at the center of buoyancy,
/// expressed in the body frame.
pub fn restoring_wrench(attitude: &UnitQuaternion<f64>, p: &RobotParams) -> WrenchBody {
    let to_body = attitude.inverse();
    let weight = to_body * Vector3::new(0.0, 0.0, -p.weight());
    let buoyancy = to_body * Vector3::new(0.0, 0.0, p.buoyancy());
    WrenchBody {
        force: weight + buoyancy,
        torque: p.r_cob().cross(&buoyancy),
    }
}

/// Componentwise `-D_lin ν - D_quad |ν| ν`.
pub fn drag_wrench(state: &BodyState, p: &RobotParams) -> WrenchBody {
    let nu = Vector6::new(
        state.lin_vel.x,
        state.lin_vel.y,
        state.lin_vel.z,
        state.ang_vel.x,
        state.ang_vel.y,
        state.ang_vel.z,
    );
    let d = Vector6::from_fn(|i, _| {
        -p.drag_linear[i] * nu[i] - p.drag_quadratic[i] * nu[i].abs() * nu[i]
    });
    WrenchBody {
        force: Vector3::new(d[0], d[1], d[2]),
        torque: Vector3::new(d[3], d[4], d[5]),
    }
}

/// Sum of the twelve arm wrenches, hull drag, and the restoring wrench.
pub fn net_wrench(
    state: &BodyState,
    motor_speeds: &[f64; ARM_COUNT],
    mounts: &[ArmMount],
    thrust: &PreparedThrust,
    p: &RobotParams,
) -> WrenchBody {
    let mut total = WrenchBody::zero();
    for m in mounts {
        total += arm_wrench(m, thrust, motor_speeds[m.index], &state.lin_vel, &state.ang_vel);
    }
    total + drag_wrench(state, p) + restoring_wrench(&state.attitude, p)
}

/// One semi-implicit Euler step of the body-frame Newton–Euler equations
///
/// ```text
/// M_v v' = F - ω × (M_v v)
/// I_t ω' = T - ω × (I_t ω) - v × (M_v v)
/// ```
///
/// Velocities are advanced first and the pose is advanced with the new
/// velocities; the attitude uses the exponential map and is renormalised.
pub fn integrate_step(
    state: &BodyState,
    wrench: &WrenchBody,
    p: &RobotParams,
    dt: f64,
) -> Result<BodyState> {
    if !(dt > 0.0 && dt <= MAX_DT) {
        return Err(SimError::param("dt", format!("must lie in (0, {MAX_DT}], got {dt}")));
    }
    let mass = p.effective_mass();
    let inertia = p.effective_inertia();
    let inertia_inv = inertia
        .try_inverse()
        .ok_or_else(|| SimError::param("inertia", "singular"))?;

    let v = state.lin_vel;
    let w = state.ang_vel;
    let lin_momentum = v.component_mul(&mass);
    let ang_momentum = inertia * w;

    let lin_acc = (wrench.force - w.cross(&lin_momentum)).component_div(&mass);
    let ang_acc =
        inertia_inv * (wrench.torque - w.cross(&ang_momentum) - v.cross(&lin_momentum));

    let lin_vel = v + lin_acc * dt;
    let ang_vel = w + ang_acc * dt;

    let position = state.position + state.attitude * (lin_vel * dt);
    let rotation = ang_vel * dt;
    let attitude = if rotation == Vector3::zeros() {
        state.attitude
    } else {
        let q = state.attitude * UnitQuaternion::from_scaled_axis(rotation);
        UnitQuaternion::new_normalize(q.into_inner())
    };

    Ok(BodyState {
        position,
        attitude,
        lin_vel,
        ang_vel,
    })
}
