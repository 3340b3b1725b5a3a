//! Open-loop runs: a straight leg, then turns in both directions.
//!
//! `cargo run --release --example forward_and_turn [out.jsonl]`
//! With a path, the straight run's trajectory log is written there.

use flagella_sim::sim::{run_scenario, ScenarioConfig, ScriptEntry, TelemetryFrame};

fn script(duration: f64, entries: &[(f64, f64, f64)]) -> ScenarioConfig {
    ScenarioConfig {
        duration,
        command_script: entries.iter().map(|&(t_start, surge, yaw)| ScriptEntry { t_start, surge, yaw }).collect(),
        ..ScenarioConfig::default()
    }
}

fn summary(label: &str, frames: &[TelemetryFrame]) {
    let mut turned = 0.0;
    for w in frames.windows(2) {
        let mut d = w[1].heading - w[0].heading;
        d -= std::f64::consts::TAU * (d / std::f64::consts::TAU).round();
        turned += d;
    }
    let end = frames.last().unwrap();
    println!(
        "{label:<22} x {:+7.3} m  y {:+7.3} m  z {:+.2e} m  turned {:+8.1} deg",
        end.position[0],
        end.position[1],
        end.position[2],
        turned.to_degrees()
    );
}

fn main() -> flagella_sim::Result<()> {
    let forward = run_scenario(&script(30.0, &[(0.0, 0.8, 0.0)]))?;
    summary("surge 0.8, 30 s", &forward.frames);
    let speeds: Vec<f64> = forward.frames.iter().map(|f| f.lin_vel[0]).collect();
    println!("  cruise speed {:.4} m/s after 30 s", speeds.last().unwrap());

    summary("yaw +0.5, 30 s", &run_scenario(&script(30.0, &[(0.0, 0.0, 0.5)]))?.frames);
    summary("yaw -0.5, 30 s", &run_scenario(&script(30.0, &[(0.0, 0.0, -0.5)]))?.frames);
    summary("surge 0.6 + yaw 0.2", &run_scenario(&script(40.0, &[(0.0, 0.6, 0.2)]))?.frames);
    summary(
        "box: 4 legs",
        &run_scenario(&script(
            48.0,
            &[(0.0, 0.8, 0.0), (10.0, 0.0, 0.6), (12.0, 0.8, 0.0), (22.0, 0.0, 0.6), (24.0, 0.8, 0.0), (34.0, 0.0, 0.6), (36.0, 0.8, 0.0)],
        ))?
        .frames,
    );

    if let Some(path) = std::env::args().nth(1) {
        forward.write_to(std::io::BufWriter::new(std::fs::File::create(&path)?))?;
        println!("wrote {} frames to {path}", forward.frames.len());
    }
    Ok(())
}
