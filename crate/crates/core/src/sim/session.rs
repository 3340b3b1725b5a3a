//! The fixed-step simulation loop shared by batch runs, replay, and the server.

use nalgebra::{UnitQuaternion, Vector3};

use crate::actuation::{expand_pairs, motor_step, MotorState, PairDuties};
use crate::autopilot::{imu_sample, pid_step, PidState};
use crate::dynamics::{integrate_step, net_wrench, BodyState};
use crate::error::{Result, SimError};
use crate::geometry::{dodecahedron_mounts, ArmMount, ARM_COUNT};
use crate::hydro::PreparedThrust;
use crate::mixer::{build_allocation, mix, AllocationTable, ManeuverCommand};

use super::config::{ModeConfig, ScenarioConfig};
use super::telemetry::{ControlMode, ModeName, PilotEvent, TelemetryFrame};

/// Rate at which a held command fades to zero once the pilot link drops, 1/s.
pub const LINK_LOSS_DECAY_PER_S: f64 = 2.0;

#[derive(Debug, Clone)]
pub struct Simulation {
    cfg: ScenarioConfig,
    mounts: Vec<ArmMount>,
    thrust: PreparedThrust,
    table: AllocationTable,
    state: BodyState,
    motors: [MotorState; ARM_COUNT],
    pid: PidState,
    step: u64,
    command: ManeuverCommand,
    mode: ControlMode,
    link_up: bool,
    duties: PairDuties,
}

impl Simulation {
    pub fn new(cfg: &ScenarioConfig) -> Result<Self> {
        cfg.validate()?;
        let mounts = dodecahedron_mounts(&cfg.frame);
        let thrust = cfg.thrust_model.prepare()?;
        let table = build_allocation(&mounts, &thrust, &cfg.motors, cfg.omega_ref())?;
        let init = &cfg.initial;
        let [roll, pitch, yaw] = init.attitude_rpy_deg.map(f64::to_radians);
        let state = BodyState {
            position: Vector3::from(init.position_m),
            attitude: UnitQuaternion::from_euler_angles(roll, pitch, yaw),
            lin_vel: Vector3::from(init.lin_vel_m_s),
            ang_vel: Vector3::from(init.ang_vel_rad_s),
        };
        let mode = match cfg.mode {
            ModeConfig::OpenLoop => ControlMode::OpenLoop,
            ModeConfig::HeadingHold { setpoint_deg } => ControlMode::HeadingHold { setpoint_deg },
        };
        Ok(Self {
            cfg: cfg.clone(),
            mounts,
            thrust,
            table,
            state,
            motors: [MotorState::default(); ARM_COUNT],
            pid: PidState::default(),
            step: 0,
            command: ManeuverCommand::default(),
            mode,
            link_up: true,
            duties: PairDuties::zero(),
        })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.cfg
    }

    pub fn mounts(&self) -> &[ArmMount] {
        &self.mounts
    }

    pub fn allocation(&self) -> &AllocationTable {
        &self.table
    }

    pub fn state(&self) -> &BodyState {
        &self.state
    }

    pub fn step_index(&self) -> u64 {
        self.step
    }

    pub fn time(&self) -> f64 {
        self.step as f64 * self.cfg.dt
    }

    pub fn command(&self) -> ManeuverCommand {
        self.command
    }

    pub fn mode(&self) -> ControlMode {
        self.mode
    }

    pub fn link_up(&self) -> bool {
        self.link_up
    }

    pub fn motor_speeds(&self) -> [f64; ARM_COUNT] {
        self.motors.map(|m| m.omega)
    }

    /// Applies a pilot event before the next step.
    pub fn apply(&mut self, event: &PilotEvent) {
        match *event {
            PilotEvent::Cmd { surge, yaw } => self.command = ManeuverCommand::clamped(surge, yaw),
            PilotEvent::Mode { value, setpoint_deg } => {
                let next = match (value, setpoint_deg) {
                    (ModeName::HeadingHold, Some(sp)) if sp.is_finite() => {
                        ControlMode::HeadingHold { setpoint_deg: sp }
                    }
                    (ModeName::HeadingHold, _) => return,
                    (ModeName::OpenLoop, _) => ControlMode::OpenLoop,
                };
                if next.name() != self.mode.name() {
                    self.pid = PidState::default();
                }
                self.mode = next;
            }
            PilotEvent::Link { connected } => {
                self.link_up = connected;
                if !connected {
                    self.mode = ControlMode::OpenLoop;
                    self.pid = PidState::default();
                }
            }
            PilotEvent::End => {}
        }
    }

    /// Advances one physics step.
    pub fn step(&mut self) -> Result<()> {
        let dt = self.cfg.dt;
        if !self.link_up {
            let fade = |v: f64| {
                let mag = (v.abs() - LINK_LOSS_DECAY_PER_S * dt).max(0.0);
                mag.copysign(v)
            };
            self.command = ManeuverCommand { surge: fade(self.command.surge), yaw: fade(self.command.yaw) };
        }

        let yaw = match self.mode {
            ControlMode::OpenLoop => self.command.yaw,
            ControlMode::HeadingHold { setpoint_deg } => {
                let imu = imu_sample(&self.state, &self.cfg.imu, self.step);
                let (u, pid) = pid_step(
                    &self.cfg.gains,
                    &self.pid,
                    setpoint_deg.to_radians(),
                    imu.heading,
                    imu.yaw_rate,
                    dt,
                )?;
                self.pid = pid;
                u
            }
        };
        self.duties = mix(&ManeuverCommand { surge: self.command.surge, yaw }, &self.table);

        let arm_duties = expand_pairs(&self.duties, &self.mounts);
        for (motor, duty) in self.motors.iter_mut().zip(arm_duties) {
            *motor = motor_step(*motor, duty, &self.cfg.motors, dt)?;
        }
        let speeds = self.motor_speeds();
        let wrench = net_wrench(&self.state, &speeds, &self.mounts, &self.thrust, &self.cfg.robot);
        let next = integrate_step(&self.state, &wrench, &self.cfg.robot, dt)?;
        if !next.is_finite() || !speeds.iter().all(|w| w.is_finite()) {
            return Err(SimError::NonFinite { step: self.step });
        }
        self.state = next;
        self.step += 1;
        Ok(())
    }

    pub fn frame(&self) -> TelemetryFrame {
        let q = self.state.attitude.quaternion();
        TelemetryFrame {
            t: self.time(),
            position: self.state.position.into(),
            attitude: [q.w, q.i, q.j, q.k],
            lin_vel: self.state.lin_vel.into(),
            ang_vel: self.state.ang_vel.into(),
            pair_duties: *self.duties.as_array(),
            motor_speeds: self.motor_speeds(),
            heading: self.state.heading(),
        }
    }
}
