//! Scenario configuration (TOML, units spelled out in the field names).

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::actuation::MotorParams;
use crate::autopilot::{ImuModel, PidGains};
use crate::ballast::{WeightInventory, WeightItem};
use crate::dynamics::{RobotParams, MAX_DT};
use crate::error::{Result, SimError};
use crate::geometry::FrameParams;
use crate::hydro::ThrustModel;
use crate::mixer::DEFAULT_REFERENCE_FRACTION;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModeConfig {
    #[default]
    OpenLoop,
    HeadingHold { setpoint_deg: f64 },
}

/// Step-hold command: active from `t_start_s` until the next entry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScriptEntry {
    #[serde(rename = "t_start_s")]
    pub t_start: f64,
    #[serde(default)]
    pub surge: f64,
    #[serde(default)]
    pub yaw: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MixerConfig {
    /// Linearisation speed as a fraction of `omega_max`.
    pub reference_speed_fraction: f64,
}

impl Default for MixerConfig {
    fn default() -> Self {
        Self {
            reference_speed_fraction: DEFAULT_REFERENCE_FRACTION,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BallastConfig {
    pub inventory: Vec<WeightItem>,
}

impl Default for BallastConfig {
    fn default() -> Self {
        Self {
            inventory: WeightInventory::tank_trial().items,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialState {
    pub position_m: [f64; 3],
    /// Roll, pitch, yaw.
    pub attitude_rpy_deg: [f64; 3],
    pub lin_vel_m_s: [f64; 3],
    pub ang_vel_rad_s: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(rename = "dt_s", default = "default_dt")]
    pub dt: f64,
    #[serde(rename = "duration_s")]
    pub duration: f64,
    #[serde(default = "default_decimation")]
    pub log_decimation: u32,
    #[serde(default)]
    pub mode: ModeConfig,
    #[serde(default)]
    pub frame: FrameParams,
    #[serde(default)]
    pub robot: RobotParams,
    #[serde(default)]
    pub motors: MotorParams,
    #[serde(default)]
    pub thrust_model: ThrustModel,
    #[serde(default)]
    pub imu: ImuModel,
    #[serde(default)]
    pub gains: PidGains,
    #[serde(default)]
    pub mixer: MixerConfig,
    #[serde(default)]
    pub ballast: BallastConfig,
    #[serde(default)]
    pub initial: InitialState,
    #[serde(rename = "command", default)]
    pub command_script: Vec<ScriptEntry>,
}

fn default_dt() -> f64 {
    1e-3
}

fn default_decimation() -> u32 {
    10
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            dt: default_dt(),
            duration: 60.0,
            log_decimation: default_decimation(),
            mode: ModeConfig::default(),
            frame: FrameParams::default(),
            robot: RobotParams::default(),
            motors: MotorParams::default(),
            thrust_model: ThrustModel::default(),
            imu: ImuModel::default(),
            gains: PidGains::default(),
            mixer: MixerConfig::default(),
            ballast: BallastConfig::default(),
            initial: InitialState::default(),
            command_script: Vec::new(),
        }
    }
}

/// Re-labels a parameter error with its config section.
fn in_section(section: &str) -> impl Fn(SimError) -> SimError + '_ {
    move |e| match e {
        SimError::Parameter { name, reason } => SimError::config(format!("{section}.{name}"), reason),
        other => other,
    }
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serialises to TOML")
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt <= MAX_DT) {
            return Err(SimError::config("dt_s", format!("must lie in (0, {MAX_DT}]")));
        }
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(SimError::config("duration_s", "must be positive"));
        }
        if self.log_decimation == 0 {
            return Err(SimError::config("log_decimation", "must be at least 1"));
        }
        if let ModeConfig::HeadingHold { setpoint_deg } = self.mode {
            if !setpoint_deg.is_finite() {
                return Err(SimError::config("mode.setpoint_deg", "must be finite"));
            }
        }
        self.frame.validate().map_err(in_section("frame"))?;
        self.robot.validate().map_err(in_section("robot"))?;
        self.motors.validate().map_err(in_section("motors"))?;
        self.thrust_model.validate().map_err(in_section("thrust_model"))?;
        self.imu.validate().map_err(in_section("imu"))?;
        self.gains.validate().map_err(in_section("gains"))?;
        let frac = self.mixer.reference_speed_fraction;
        if !(frac > 0.0 && frac <= 1.0) {
            return Err(SimError::config("mixer.reference_speed_fraction", "must lie in (0, 1]"));
        }
        WeightInventory { items: self.ballast.inventory.clone() }
            .validate()
            .map_err(in_section("ballast"))?;
        let state_ok = [
            self.initial.position_m,
            self.initial.attitude_rpy_deg,
            self.initial.lin_vel_m_s,
            self.initial.ang_vel_rad_s,
        ]
        .iter()
        .flatten()
        .all(|v| v.is_finite());
        if !state_ok {
            return Err(SimError::config("initial", "must be finite"));
        }

        let mut prev = f64::NEG_INFINITY;
        for (i, entry) in self.command_script.iter().enumerate() {
            let field = format!("command[{i}]");
            if !(entry.t_start >= 0.0 && entry.t_start.is_finite()) {
                return Err(SimError::config(format!("{field}.t_start_s"), "must be non-negative"));
            }
            if entry.t_start < prev {
                return Err(SimError::config(format!("{field}.t_start_s"), "times must be nondecreasing"));
            }
            for (name, v) in [("surge", entry.surge), ("yaw", entry.yaw)] {
                if !(-1.0..=1.0).contains(&v) {
                    return Err(SimError::config(format!("{field}.{name}"), "must lie in [-1, 1]"));
                }
            }
            prev = entry.t_start;
        }
        Ok(())
    }

    /// Number of physics steps in the scenario.
    pub fn step_count(&self) -> u64 {
        (self.duration / self.dt).round() as u64
    }

    /// First step at or after time `t`.
    pub fn step_at(&self, t: f64) -> u64 {
        (t / self.dt - 1e-9).ceil().max(0.0) as u64
    }

    pub fn omega_ref(&self) -> f64 {
        self.mixer.reference_speed_fraction * self.motors.omega_max
    }

    pub fn inventory(&self) -> WeightInventory {
        WeightInventory { items: self.ballast.inventory.clone() }
    }

    /// SHA-256 over the canonical JSON form of the parsed config.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serialises to JSON");
        hex::encode(Sha256::digest(canonical))
    }
}
