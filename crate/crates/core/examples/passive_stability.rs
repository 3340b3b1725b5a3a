//! Released at 10 degrees of roll, the robot rights itself because the
//! center of buoyancy sits above the center of mass.
//!
//! `cargo run --release --example passive_stability`

use flagella_sim::dynamics::RobotParams;
use flagella_sim::sim::{run_scenario, ScenarioConfig};

fn roll_deg(attitude: [f64; 4]) -> f64 {
    let [w, x, y, z] = attitude;
    (2.0 * (w * x + y * z)).atan2(1.0 - 2.0 * (x * x + y * y)).to_degrees()
}

fn main() -> flagella_sim::Result<()> {
    for r_cob_z in [0.02, 0.005] {
        let mut cfg = ScenarioConfig {
            duration: 30.0,
            log_decimation: 10,
            robot: RobotParams { r_cob: [0.0, 0.0, r_cob_z], ..RobotParams::default() },
            ..ScenarioConfig::default()
        };
        cfg.initial.attitude_rpy_deg = [10.0, 0.0, 0.0];
        let frames = run_scenario(&cfg)?.frames;
        let roll: Vec<f64> = frames.iter().map(|f| roll_deg(f.attitude)).collect();
        let peaks: Vec<String> = (1..roll.len() - 1)
            .filter(|&i| roll[i].abs() >= roll[i - 1].abs() && roll[i].abs() > roll[i + 1].abs())
            .take(6)
            .map(|i| format!("{:.2}@{:.1}s", roll[i], frames[i].t))
            .collect();
        println!("center of buoyancy {:.3} m above CG", r_cob_z);
        println!("  first roll peaks: {}", peaks.join(", "));
        println!("  roll after 30 s: {:.2e} deg", roll.last().unwrap());
    }
    Ok(())
}
