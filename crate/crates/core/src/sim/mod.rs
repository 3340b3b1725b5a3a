//! Scenario runs, live piloting, and deterministic replay.

pub mod config;
pub mod server;
pub mod session;
pub mod telemetry;

use crate::error::{Result, SimError};

pub use config::{ModeConfig, ScenarioConfig, ScriptEntry};
pub use server::{serve, ServeOptions, ServerHandle, SessionRecord};
pub use session::Simulation;
pub use telemetry::{
    ClientMessage, CommandTimeline, ControlMode, LogHeader, ModeName, PilotEvent, TelemetryFrame,
    TimedEvent, Trajectory,
};

/// Steps `sim` up to `end_step`, applying each event before the step it is
/// stamped with. A frame is taken at every multiple of `decimation`,
/// including step 0 and `end_step` itself.
pub fn drive(
    sim: &mut Simulation,
    events: &[TimedEvent],
    end_step: u64,
    decimation: u32,
) -> Result<Vec<TelemetryFrame>> {
    let decimation = u64::from(decimation.max(1));
    let mut frames = Vec::with_capacity((end_step / decimation + 1) as usize);
    let mut pending = events.iter().peekable();
    loop {
        let step = sim.step_index();
        while let Some(e) = pending.next_if(|e| e.step <= step) {
            sim.apply(&e.event);
        }
        if step.is_multiple_of(decimation) {
            frames.push(sim.frame());
        }
        if step >= end_step {
            return Ok(frames);
        }
        sim.step()?;
    }
}

/// The scripted commands of `cfg` as timed events.
pub fn script_events(cfg: &ScenarioConfig) -> Vec<TimedEvent> {
    cfg.command_script
        .iter()
        .map(|e| TimedEvent {
            step: cfg.step_at(e.t_start),
            event: PilotEvent::Cmd { surge: e.surge, yaw: e.yaw },
        })
        .collect()
}

/// Runs a scripted scenario from start to `duration_s`.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<Trajectory> {
    let mut sim = Simulation::new(cfg)?;
    let frames = drive(&mut sim, &script_events(cfg), cfg.step_count(), cfg.log_decimation)?;
    Ok(Trajectory { header: LogHeader::new(cfg.hash()), frames })
}

/// Re-runs a recorded live session.
pub fn replay(cfg: &ScenarioConfig, timeline: &CommandTimeline) -> Result<Trajectory> {
    let hash = cfg.hash();
    if timeline.header.config_hash != hash {
        return Err(SimError::Record(format!(
            "timeline was recorded with config {}, this config hashes to {hash}",
            timeline.header.config_hash
        )));
    }
    if timeline.header.dt_s != cfg.dt {
        return Err(SimError::Record("timeline dt_s differs from the config".into()));
    }
    let end = timeline
        .end_step()
        .ok_or_else(|| SimError::Record("timeline has no end event".into()))?;
    let mut sim = Simulation::new(cfg)?;
    let frames = drive(&mut sim, &timeline.events, end, timeline.header.telemetry_decimation)?;
    Ok(Trajectory { header: LogHeader::new(hash), frames })
}
