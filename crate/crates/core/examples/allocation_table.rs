//! Builds the pair allocation table and mixes a few pilot commands.
//!
//! `cargo run --example allocation_table`

use flagella_sim::actuation::MotorParams;
use flagella_sim::geometry::{dodecahedron_mounts, FrameParams};
use flagella_sim::hydro::ThrustModel;
use flagella_sim::mixer::{build_allocation, mix, steady_state_wrench, ManeuverCommand};

fn main() -> flagella_sim::Result<()> {
    let mounts = dodecahedron_mounts(&FrameParams::default());
    let thrust = ThrustModel::default().prepare()?;
    let motor = MotorParams::default();
    let table = build_allocation(&mounts, &thrust, &motor, 0.7 * motor.omega_max)?;
    println!("{}", table.to_json());

    println!("\n surge   yaw | pair duties                                  | Fx (N)   Mz (N m)  |M_xy|");
    for (surge, yaw) in [(1.0, 0.0), (0.5, 0.0), (0.0, 0.5), (0.0, -1.0), (0.6, 0.3), (1.0, 1.0)] {
        let d = mix(&ManeuverCommand::clamped(surge, yaw), &table);
        let w = steady_state_wrench(&d, &mounts, &thrust, &motor);
        let cells: Vec<String> = d.as_array().iter().map(|v| format!("{v:+.3}")).collect();
        println!(
            "{surge:>6} {yaw:>5} | {} | {:+.4} {:+.2e} {:.1e}",
            cells.join(" "),
            w.force.x,
            w.torque.z,
            w.torque.xy().norm()
        );
    }
    Ok(())
}
