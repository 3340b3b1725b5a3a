//! Heading hold: a 30 degree step, then a setpoint change while cruising.
//!
//! `cargo run --release --example heading_hold`

use flagella_sim::sim::{drive, ModeConfig, PilotEvent, ScenarioConfig, Simulation, TimedEvent};
use flagella_sim::sim::telemetry::ControlMode;

fn main() -> flagella_sim::Result<()> {
    let cfg = ScenarioConfig {
        duration: 60.0,
        log_decimation: 2000,
        mode: ModeConfig::HeadingHold { setpoint_deg: 30.0 },
        ..ScenarioConfig::default()
    };
    let mut sim = Simulation::new(&cfg)?;
    let events = [
        TimedEvent { step: 0, event: PilotEvent::Cmd { surge: 0.4, yaw: 0.0 } },
        TimedEvent { step: cfg.step_at(30.0), event: PilotEvent::mode(ControlMode::HeadingHold { setpoint_deg: -45.0 }) },
    ];
    let frames = drive(&mut sim, &events, cfg.step_count(), cfg.log_decimation)?;
    println!("    t (s)  heading (deg)  yaw rate (deg/s)   x (m)   y (m)");
    for f in &frames {
        println!(
            "{:>9.1} {:>14.2} {:>17.3} {:>7.3} {:>7.3}",
            f.t,
            f.heading.to_degrees(),
            f.ang_vel[2].to_degrees(),
            f.position[0],
            f.position[1]
        );
    }
    Ok(())
}
