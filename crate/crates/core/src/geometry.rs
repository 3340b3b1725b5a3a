//! Dodecahedral mounting geometry for the twelve flagellar arms.
//!
//! Arms sit on the outward face normals of a regular dodecahedron. The
//! normals come in six antipodal couples; each couple is one motor pair
//! sharing a single driver channel. Arms `0..6` are the canonical member of
//! each pair and arm `i + 6` is the antipode of arm `i`, so `pair_of(i) = i % 6`.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

pub const ARM_COUNT: usize = 12;
pub const PAIR_COUNT: usize = 6;

/// Golden ratio.
pub const PHI: f64 = 1.618_033_988_749_895;

/// Helix chirality of each pair, indexed by pair id.
///
/// Both arms of a pair share a chirality. The two chirality classes each
/// hold three pairs whose axes span 3-space, which is what lets the pairs'
/// shaft reaction torques cancel in surge while still leaving yaw authority.
/// Pairs normal to body x (0 and 1) fall in opposite classes, so they stay
/// idle in a pure surge allocation.
pub const PAIR_HANDEDNESS: [i8; PAIR_COUNT] = [1, -1, 1, 1, -1, -1];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FrameParams {
    /// Center of the hull to the face centers.
    #[serde(rename = "frame_radius_m")]
    pub frame_radius: f64,
    /// Extra offset of the arm root beyond the face, along the normal.
    #[serde(rename = "arm_root_offset_m")]
    pub arm_root_offset: f64,
}

impl Default for FrameParams {
    fn default() -> Self {
        Self {
            frame_radius: 0.15,
            arm_root_offset: 0.02,
        }
    }
}

impl FrameParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.frame_radius > 0.0 && self.frame_radius.is_finite()) {
            return Err(SimError::param("frame_radius", "must be strictly positive"));
        }
        if !(self.arm_root_offset > 0.0 && self.arm_root_offset.is_finite()) {
            return Err(SimError::param("arm_root_offset", "must be strictly positive"));
        }
        Ok(())
    }

    /// Distance from the center of mass to each arm root.
    pub fn mount_radius(&self) -> f64 {
        self.frame_radius + self.arm_root_offset
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmMount {
    pub index: usize,
    pub pair_id: usize,
    /// Arm root in the body frame, meters.
    pub mount_point: Vector3<f64>,
    /// Outward unit face normal, body frame.
    pub axis: Vector3<f64>,
    /// Helix chirality, +1 right-handed, -1 left-handed.
    pub handedness: i8,
    /// Motor wiring polarity: the shaft turns `polarity * omega` about `axis`
    /// for motor speed `omega`. The two motors of a pair are wired in
    /// opposition (+1 on the canonical arm, -1 on its antipode).
    pub polarity: i8,
}

/// The twelve unnormalized face normals: cyclic permutations of (0, ±1, ±φ).
pub fn face_normals() -> Vec<Vector3<f64>> {
    let mut normals = Vec::with_capacity(ARM_COUNT);
    for &a in &[1.0, -1.0] {
        for &b in &[PHI, -PHI] {
            normals.push(Vector3::new(0.0, a, b));
            normals.push(Vector3::new(a, b, 0.0));
            normals.push(Vector3::new(b, 0.0, a));
        }
    }
    normals
}

/// Builds the twelve arm mounts in canonical order.
///
/// Normals are sorted by `(z, y, x)` descending; the first six are the
/// pair representatives (positive z, ties broken by positive y then x) and
/// the antipode of representative `i` becomes arm `i + 6`.
pub fn dodecahedron_mounts(frame: &FrameParams) -> Vec<ArmMount> {
    let mut normals: Vec<Vector3<f64>> = face_normals().into_iter().map(|n| n.normalize()).collect();
    normals.sort_by(|a, b| {
        (b.z, b.y, b.x)
            .partial_cmp(&(a.z, a.y, a.x))
            .expect("face normals are finite")
    });

    let radius = frame.mount_radius();
    let mut mounts = Vec::with_capacity(ARM_COUNT);
    for (pair_id, axis) in normals.iter().take(PAIR_COUNT).enumerate() {
        mounts.push(ArmMount {
            index: pair_id,
            pair_id,
            mount_point: axis * radius,
            axis: *axis,
            handedness: PAIR_HANDEDNESS[pair_id],
            polarity: 1,
        });
    }
    for pair_id in 0..PAIR_COUNT {
        let axis = -mounts[pair_id].axis;
        mounts.push(ArmMount {
            index: pair_id + PAIR_COUNT,
            pair_id,
            mount_point: axis * radius,
            axis,
            handedness: PAIR_HANDEDNESS[pair_id],
            polarity: -1,
        });
    }
    mounts
}

pub fn pair_of(index: usize) -> Result<usize> {
    if index >= ARM_COUNT {
        return Err(SimError::ArmIndex(index));
    }
    Ok(index % PAIR_COUNT)
}

/// Gram matrix `Σ a aᵀ` of the six canonical pair axes.
pub fn pair_axis_gram(mounts: &[ArmMount]) -> Matrix3<f64> {
    mounts
        .iter()
        .take(PAIR_COUNT)
        .fold(Matrix3::zeros(), |acc, m| acc + m.axis * m.axis.transpose())
}
