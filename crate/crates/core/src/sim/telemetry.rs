//! Telemetry frames, the trajectory log, the command timeline sidecar, and
//! the newline-delimited JSON wire protocol.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::geometry::{ARM_COUNT, PAIR_COUNT};
use crate::mixer::ManeuverCommand;

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TelemetryFrame {
    pub t: f64,
    pub position: [f64; 3],
    /// `[w, x, y, z]`.
    pub attitude: [f64; 4],
    pub lin_vel: [f64; 3],
    pub ang_vel: [f64; 3],
    pub pair_duties: [f64; PAIR_COUNT],
    pub motor_speeds: [f64; ARM_COUNT],
    pub heading: f64,
}

impl TelemetryFrame {
    /// Every numeric state component in a fixed order.
    pub fn state_components(&self) -> impl Iterator<Item = f64> + '_ {
        self.position
            .iter()
            .chain(&self.attitude)
            .chain(&self.lin_vel)
            .chain(&self.ang_vel)
            .chain(&self.motor_speeds)
            .copied()
    }

    /// Largest absolute difference over the state components.
    pub fn max_state_deviation(&self, other: &TelemetryFrame) -> f64 {
        self.state_components()
            .zip(other.state_components())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogHeader {
    #[serde(rename = "type")]
    pub kind: String,
    pub version: String,
    pub config_hash: String,
}

impl LogHeader {
    pub fn new(config_hash: String) -> Self {
        Self {
            kind: "header".into(),
            version: ARTIFACT_VERSION.into(),
            config_hash,
        }
    }
}

/// A header line followed by one frame per line.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub header: LogHeader,
    pub frames: Vec<TelemetryFrame>,
}

impl Trajectory {
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer(&mut out, &self.header)?;
        out.write_all(b"\n")?;
        for frame in &self.frames {
            serde_json::to_writer(&mut out, frame)?;
            out.write_all(b"\n")?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to a Vec cannot fail");
        buf
    }

    pub fn read_from<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let header: LogHeader = match lines.next() {
            Some(line) => serde_json::from_str(&line?)?,
            None => return Err(SimError::Record("empty trajectory log".into())),
        };
        if header.kind != "header" {
            return Err(SimError::Record("first line must be the header record".into()));
        }
        let mut frames = Vec::new();
        for line in lines {
            let line = line?;
            if !line.trim().is_empty() {
                frames.push(serde_json::from_str(&line)?);
            }
        }
        Ok(Self { header, frames })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeName {
    OpenLoop,
    HeadingHold,
}

/// Heading-hold setpoints travel in degrees on the wire and in the timeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ControlMode {
    OpenLoop,
    HeadingHold { setpoint_deg: f64 },
}

impl ControlMode {
    pub fn name(&self) -> ModeName {
        match self {
            ControlMode::OpenLoop => ModeName::OpenLoop,
            ControlMode::HeadingHold { .. } => ModeName::HeadingHold,
        }
    }
}

/// Something the pilot link changed, applied before the step it is stamped with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum PilotEvent {
    Cmd { surge: f64, yaw: f64 },
    Mode {
        value: ModeName,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        setpoint_deg: Option<f64>,
    },
    Link { connected: bool },
    End,
}

impl PilotEvent {
    pub fn command(cmd: ManeuverCommand) -> Self {
        PilotEvent::Cmd { surge: cmd.surge, yaw: cmd.yaw }
    }

    pub fn mode(mode: ControlMode) -> Self {
        match mode {
            ControlMode::OpenLoop => PilotEvent::Mode { value: ModeName::OpenLoop, setpoint_deg: None },
            ControlMode::HeadingHold { setpoint_deg } => PilotEvent::Mode {
                value: ModeName::HeadingHold,
                setpoint_deg: Some(setpoint_deg),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimedEvent {
    pub step: u64,
    #[serde(flatten)]
    pub event: PilotEvent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimelineHeader {
    #[serde(rename = "type")]
    pub kind: String,
    pub version: String,
    pub config_hash: String,
    pub dt_s: f64,
    pub telemetry_decimation: u32,
}

/// Every pilot event of a live session, stamped with the physics step at
/// which it took effect.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandTimeline {
    pub header: TimelineHeader,
    pub events: Vec<TimedEvent>,
}

impl CommandTimeline {
    pub fn new(config_hash: String, dt_s: f64, telemetry_decimation: u32) -> Self {
        Self {
            header: TimelineHeader {
                kind: "header".into(),
                version: ARTIFACT_VERSION.into(),
                config_hash,
                dt_s,
                telemetry_decimation,
            },
            events: Vec::new(),
        }
    }

    /// Step of the closing `end` event, if the session finished cleanly.
    pub fn end_step(&self) -> Option<u64> {
        self.events
            .iter()
            .rev()
            .find(|e| e.event == PilotEvent::End)
            .map(|e| e.step)
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer(&mut out, &self.header)?;
        out.write_all(b"\n")?;
        for e in &self.events {
            serde_json::to_writer(&mut out, e)?;
            out.write_all(b"\n")?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_from<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let header: TimelineHeader = match lines.next() {
            Some(line) => serde_json::from_str(&line?)?,
            None => return Err(SimError::Record("empty timeline".into())),
        };
        let mut events: Vec<TimedEvent> = Vec::new();
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let e: TimedEvent = serde_json::from_str(&line)?;
            if events.last().is_some_and(|prev| prev.step > e.step) {
                return Err(SimError::Record(format!("timeline steps go backwards at step {}", e.step)));
            }
            events.push(e);
        }
        Ok(Self { header, events })
    }
}

/// Client to server.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClientMessage {
    Cmd { surge: f64, yaw: f64 },
    Mode {
        value: ModeName,
        #[serde(default)]
        setpoint_deg: Option<f64>,
    },
}

impl ClientMessage {
    pub fn parse(line: &str) -> std::result::Result<Self, String> {
        let msg: ClientMessage = serde_json::from_str(line.trim()).map_err(|e| e.to_string())?;
        match msg {
            ClientMessage::Cmd { surge, yaw } if !(surge.is_finite() && yaw.is_finite()) => {
                Err("surge and yaw must be finite".into())
            }
            ClientMessage::Mode { value: ModeName::HeadingHold, setpoint_deg } => match setpoint_deg {
                Some(v) if v.is_finite() => Ok(msg),
                _ => Err("heading_hold requires a finite setpoint_deg".into()),
            },
            _ => Ok(msg),
        }
    }
}

#[derive(Serialize)]
struct StateMessage<'a> {
    #[serde(rename = "type")]
    kind: &'static str,
    #[serde(flatten)]
    frame: &'a TelemetryFrame,
    surge: f64,
    yaw: f64,
    mode: ModeName,
}

/// Server `state` line: the frame fields followed by the applied (clamped)
/// command and the active mode.
pub fn state_message(frame: &TelemetryFrame, cmd: &ManeuverCommand, mode: ModeName) -> String {
    serde_json::to_string(&StateMessage {
        kind: "state",
        frame,
        surge: cmd.surge,
        yaw: cmd.yaw,
        mode,
    })
    .expect("state message is plain data")
}

#[derive(Serialize)]
struct ErrorMessage<'a> {
    #[serde(rename = "type")]
    kind: &'static str,
    msg: &'a str,
}

pub fn error_message(msg: &str) -> String {
    serde_json::to_string(&ErrorMessage { kind: "err", msg }).expect("error message is plain data")
}
