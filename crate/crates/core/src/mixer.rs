//! Maps surge and yaw efforts onto the six pair channels.
//!
//! The allocation is derived from the model rather than hand-written: each
//! pair's steady wrench per unit duty forms one column of a 6×6 matrix, and
//! two least-squares solves give the duty directions that produce a pure
//! body-x force and a pure body-z torque.

use nalgebra::{SMatrix, SVector};
use serde::{Deserialize, Serialize};

use crate::actuation::{expand_pairs, MotorParams, PairDuties};
use crate::error::{Result, SimError};
use crate::geometry::{ArmMount, PAIR_COUNT};
use crate::hydro::{arm_wrench, PreparedThrust, WrenchBody};

/// Default linearisation speed as a fraction of `omega_max`.
pub const DEFAULT_REFERENCE_FRACTION: f64 = 0.7;

/// Relative residual above which an allocation target counts as unreachable.
const REACH_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ManeuverCommand {
    pub surge: f64,
    pub yaw: f64,
}

impl ManeuverCommand {
    /// Clamps both efforts into `[-1, 1]`; non-finite values map to 0.
    pub fn clamped(surge: f64, yaw: f64) -> Self {
        let c = |v: f64| if v.is_finite() { v.clamp(-1.0, 1.0) } else { 0.0 };
        Self { surge: c(surge), yaw: c(yaw) }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("surge", self.surge), ("yaw", self.yaw)] {
            if !(-1.0..=1.0).contains(&v) {
                return Err(SimError::param(name, "must lie in [-1, 1]"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AllocationTable {
    /// Steady wrench of each pair per unit duty, body at rest.
    pub unit_wrenches: [WrenchBody; PAIR_COUNT],
    pub surge_weights: [f64; PAIR_COUNT],
    pub yaw_weights: [f64; PAIR_COUNT],
    /// Numerical rank of the unit-wrench matrix.
    pub rank: usize,
}

#[derive(Serialize)]
struct TableDump<'a> {
    rank: usize,
    surge_weights: &'a [f64; PAIR_COUNT],
    yaw_weights: &'a [f64; PAIR_COUNT],
    unit_wrenches: Vec<[f64; 6]>,
}

impl AllocationTable {
    /// JSON dump of the table for docs and diffing.
    pub fn to_json(&self) -> String {
        let dump = TableDump {
            rank: self.rank,
            surge_weights: &self.surge_weights,
            yaw_weights: &self.yaw_weights,
            unit_wrenches: self
                .unit_wrenches
                .iter()
                .map(|w| {
                    [w.force.x, w.force.y, w.force.z, w.torque.x, w.torque.y, w.torque.z]
                })
                .collect(),
        };
        serde_json::to_string_pretty(&dump).expect("table is plain data")
    }

    /// Wrench produced by an arbitrary duty vector under the linear table.
    pub fn predicted_wrench(&self, duties: &[f64; PAIR_COUNT]) -> WrenchBody {
        self.unit_wrenches
            .iter()
            .zip(duties)
            .fold(WrenchBody::zero(), |acc, (w, d)| acc + *w * *d)
    }
}

/// Wrench of every arm at steady speed for `duties`, hull at rest.
pub fn steady_state_wrench(
    duties: &PairDuties,
    mounts: &[ArmMount],
    thrust: &PreparedThrust,
    motor: &MotorParams,
) -> WrenchBody {
    let arm_duties = expand_pairs(duties, mounts);
    let still = nalgebra::Vector3::zeros();
    mounts.iter().fold(WrenchBody::zero(), |acc, m| {
        acc + arm_wrench(m, thrust, arm_duties[m.index] * motor.omega_max, &still, &still)
    })
}

pub fn build_allocation(
    mounts: &[ArmMount],
    thrust: &PreparedThrust,
    motor: &MotorParams,
    omega_ref: f64,
) -> Result<AllocationTable> {
    motor.validate()?;
    if !(omega_ref > 0.0 && omega_ref <= motor.omega_max) {
        return Err(SimError::param("omega_ref", "must lie in (0, omega_max]"));
    }
    let still = nalgebra::Vector3::zeros();
    let per_duty = motor.omega_max / omega_ref;
    let mut unit_wrenches = [WrenchBody::zero(); PAIR_COUNT];
    for m in mounts {
        unit_wrenches[m.pair_id] += arm_wrench(m, thrust, omega_ref, &still, &still) * per_duty;
    }

    let columns = SMatrix::<f64, 6, PAIR_COUNT>::from_fn(|row, col| {
        let w = &unit_wrenches[col];
        if row < 3 {
            w.force[row]
        } else {
            w.torque[row - 3]
        }
    });
    let svd = columns.svd(true, true);
    let sigma_max = svd.singular_values.max();
    let eps = sigma_max * 1e-10;
    let rank = svd.singular_values.iter().filter(|s| **s > eps).count();

    let solve = |target: SVector<f64, 6>, name: &'static str| -> Result<[f64; PAIR_COUNT]> {
        let weights = svd
            .solve(&target, eps)
            .map_err(|_| SimError::RankDeficient { rank, target: name, residual: f64::NAN })?;
        let residual = (columns * weights - target).norm() / target.norm();
        let peak = weights.amax();
        if residual.is_nan() || residual > REACH_TOLERANCE || peak == 0.0 {
            return Err(SimError::RankDeficient { rank, target: name, residual });
        }
        let mut out = [0.0; PAIR_COUNT];
        for (o, w) in out.iter_mut().zip(weights.iter()) {
            *o = w / peak;
        }
        Ok(out)
    };

    let surge_weights = solve(SVector::<f64, 6>::new(1.0, 0.0, 0.0, 0.0, 0.0, 0.0), "pure surge force")?;
    let yaw_weights = solve(SVector::<f64, 6>::new(0.0, 0.0, 0.0, 0.0, 0.0, 1.0), "pure yaw torque")?;

    Ok(AllocationTable {
        unit_wrenches,
        surge_weights,
        yaw_weights,
        rank,
    })
}

/// `clamp(surge * surge_weights + yaw * yaw_weights, -1, 1)`.
pub fn mix(cmd: &ManeuverCommand, table: &AllocationTable) -> PairDuties {
    let mut duties = [0.0; PAIR_COUNT];
    for (j, d) in duties.iter_mut().enumerate() {
        *d = cmd.surge * table.surge_weights[j] + cmd.yaw * table.yaw_weights[j];
    }
    PairDuties::new(duties)
}
