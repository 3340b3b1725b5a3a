//! Hydrodynamic wrench of a rotating flagellar arm.
//!
//! A spinning silicone arm settles into a steady helix. Treating that helix as
//! rigid and applying resistive force theory (drag `c_t` along the local
//! tangent, `c_n` normal to it) gives a symmetric linear relation between the
//! arm's axial advance speed `U`, its spin `omega` about the helix axis, and
//! the axial force and torque the water exerts on it:
//!
//! ```text
//! F   = -A U + h B omega
//! tau =  h B U - C omega
//! ```
//!
//! with `h = ±1` the helix chirality. The filament is treated as massless, so
//! the hull receives exactly this wrench through the motor mount.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::geometry::ArmMount;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HelixParams {
    #[serde(rename = "helix_radius_m")]
    pub radius: f64,
    /// Angle between the filament tangent and the plane normal to the helix
    /// axis; `π/2` is a straight filament along the axis.
    #[serde(rename = "pitch_angle_rad")]
    pub pitch_angle: f64,
    #[serde(rename = "contour_length_m")]
    pub contour_length: f64,
    #[serde(rename = "drag_normal_n_s_per_m2")]
    pub drag_normal: f64,
    #[serde(rename = "drag_tangential_n_s_per_m2")]
    pub drag_tangential: f64,
}

impl Default for HelixParams {
    fn default() -> Self {
        Self {
            radius: 0.025,
            pitch_angle: 0.7,
            contour_length: 0.20,
            drag_normal: 10.0,
            drag_tangential: 5.0,
        }
    }
}

impl HelixParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.radius,
            self.pitch_angle,
            self.contour_length,
            self.drag_normal,
            self.drag_tangential,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(SimError::param("helix", "all parameters must be finite"));
        }
        if self.radius <= 0.0 {
            return Err(SimError::param("helix_radius", "must be positive"));
        }
        if self.contour_length <= 0.0 {
            return Err(SimError::param("contour_length", "must be positive"));
        }
        if !(self.pitch_angle > 0.0 && self.pitch_angle < std::f64::consts::FRAC_PI_2) {
            return Err(SimError::param("pitch_angle", "must lie in (0, π/2)"));
        }
        if self.drag_tangential <= 0.0 {
            return Err(SimError::param("drag_tangential", "must be positive"));
        }
        if self.drag_normal < self.drag_tangential {
            return Err(SimError::param(
                "drag_normal",
                "must be at least drag_tangential (slender-body anisotropy)",
            ));
        }
        Ok(())
    }
}

/// Axial resistance coefficients of a right-handed helix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResistanceMatrix {
    /// Axial drag, N·s/m.
    pub a: f64,
    /// Translation–rotation coupling, N·s.
    pub b: f64,
    /// Rotational drag, N·m·s.
    pub c: f64,
}

impl ResistanceMatrix {
    pub fn determinant(&self) -> f64 {
        self.a * self.c - self.b * self.b
    }

    /// Axial force and torque exerted by the fluid on a helix of chirality
    /// `handedness` advancing at `u` while spinning at `omega`.
    pub fn axial_load(&self, handedness: f64, u: f64, omega: f64) -> (f64, f64) {
        let b = handedness * self.b;
        (b * omega - self.a * u, b * u - self.c * omega)
    }
}

/// Closed-form resistive-force-theory coefficients for a rigid helix.
///
/// Along the helix the tangent is `cos ψ ê_θ + sin ψ ê_z` and the velocity
/// of a centerline point under `(U, omega)` is `U ê_z + omega R ê_θ`; the
/// per-length drag is constant along the filament, so integrating over the
/// contour length is a multiplication by `Λ`.
pub fn helix_resistance(h: &HelixParams) -> Result<ResistanceMatrix> {
    h.validate()?;
    let (sin, cos) = h.pitch_angle.sin_cos();
    let (cn, ct) = (h.drag_normal, h.drag_tangential);
    let len = h.contour_length;
    let r = h.radius;
    Ok(ResistanceMatrix {
        a: len * (cn * cos * cos + ct * sin * sin),
        b: len * (cn - ct) * r * sin * cos,
        c: len * r * r * (cn * sin * sin + ct * cos * cos),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ThrustModel {
    ResistiveHelix(HelixParams),
    /// Propeller-like `omega|omega|` law.
    LumpedQuadratic {
        #[serde(rename = "k_t_n_s2_per_rad2")]
        k_t: f64,
        #[serde(rename = "k_q_n_m_s2_per_rad2")]
        k_q: f64,
        /// Operating speed at which the advance-speed drag `k_t * omega_ref`
        /// is linearised.
        #[serde(rename = "omega_ref_rad_s")]
        omega_ref: f64,
    },
}

impl Default for ThrustModel {
    fn default() -> Self {
        ThrustModel::ResistiveHelix(HelixParams::default())
    }
}

impl ThrustModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            ThrustModel::ResistiveHelix(h) => h.validate(),
            ThrustModel::LumpedQuadratic { k_t, k_q, omega_ref } => {
                if !(*k_t > 0.0 && k_t.is_finite()) {
                    return Err(SimError::param("k_t", "must be positive"));
                }
                if !(*k_q > 0.0 && k_q.is_finite()) {
                    return Err(SimError::param("k_q", "must be positive"));
                }
                if !(*omega_ref > 0.0 && omega_ref.is_finite()) {
                    return Err(SimError::param("omega_ref", "must be positive"));
                }
                Ok(())
            }
        }
    }

    /// Precomputes the per-arm evaluator.
    pub fn prepare(&self) -> Result<PreparedThrust> {
        self.validate()?;
        Ok(match *self {
            ThrustModel::ResistiveHelix(h) => PreparedThrust::Linear(helix_resistance(&h)?),
            ThrustModel::LumpedQuadratic { k_t, k_q, omega_ref } => PreparedThrust::Quadratic {
                k_t,
                k_q,
                axial_drag: k_t * omega_ref,
            },
        })
    }
}

/// A validated thrust model with its coefficients resolved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PreparedThrust {
    Linear(ResistanceMatrix),
    Quadratic { k_t: f64, k_q: f64, axial_drag: f64 },
}

impl PreparedThrust {
    /// Axial (force, torque) on one arm.
    fn axial_load(&self, handedness: f64, u: f64, spin: f64) -> (f64, f64) {
        match *self {
            PreparedThrust::Linear(rm) => rm.axial_load(handedness, u, spin),
            PreparedThrust::Quadratic { k_t, k_q, axial_drag } => {
                let signed = handedness * spin;
                (k_t * signed * signed.abs() - axial_drag * u, -k_q * spin * spin.abs())
            }
        }
    }
}

/// Force and torque on the hull, body frame, torque about the center of mass.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WrenchBody {
    pub force: Vector3<f64>,
    pub torque: Vector3<f64>,
}

impl WrenchBody {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_finite(&self) -> bool {
        self.force.iter().chain(self.torque.iter()).all(|v| v.is_finite())
    }
}

impl std::ops::Add for WrenchBody {
    type Output = WrenchBody;
    fn add(self, rhs: WrenchBody) -> WrenchBody {
        WrenchBody {
            force: self.force + rhs.force,
            torque: self.torque + rhs.torque,
        }
    }
}

impl std::ops::AddAssign for WrenchBody {
    fn add_assign(&mut self, rhs: WrenchBody) {
        self.force += rhs.force;
        self.torque += rhs.torque;
    }
}

impl std::ops::Neg for WrenchBody {
    type Output = WrenchBody;
    fn neg(self) -> WrenchBody {
        WrenchBody {
            force: -self.force,
            torque: -self.torque,
        }
    }
}

impl std::ops::Mul<f64> for WrenchBody {
    type Output = WrenchBody;
    fn mul(self, k: f64) -> WrenchBody {
        WrenchBody {
            force: self.force * k,
            torque: self.torque * k,
        }
    }
}

/// Wrench one arm applies to the hull.
///
/// `motor_speed` is the motor's signed speed; the shaft turns at
/// `mount.polarity * motor_speed` about the arm's outward axis. `lin_vel` and
/// `ang_vel` are the hull's body-frame velocities.
pub fn arm_wrench(
    mount: &ArmMount,
    thrust: &PreparedThrust,
    motor_speed: f64,
    lin_vel: &Vector3<f64>,
    ang_vel: &Vector3<f64>,
) -> WrenchBody {
    let advance = (lin_vel + ang_vel.cross(&mount.mount_point)).dot(&mount.axis);
    let spin = f64::from(mount.polarity) * motor_speed;
    let (axial_force, axial_torque) =
        thrust.axial_load(f64::from(mount.handedness), advance, spin);
    let force = mount.axis * axial_force;
    WrenchBody {
        force,
        torque: mount.mount_point.cross(&force) + mount.axis * axial_torque,
    }
}
