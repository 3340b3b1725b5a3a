//! Neutral trim from the displaced volume and the weight inventory.
//!
//! `cargo run --example ballast_calibration`

use flagella_sim::ballast::{calibrate, neutral_volume, trim_select, WeightInventory, WeightItem};
use flagella_sim::dynamics::{RobotParams, FRESH_WATER_DENSITY, TRIMMED_TOTAL_MASS};

fn main() -> flagella_sim::Result<()> {
    let robot = RobotParams::default();
    let inventory = WeightInventory::tank_trial();
    println!("inventory: {:?}", inventory.items);
    println!(
        "{TRIMMED_TOTAL_MASS} kg neutral in fresh water needs {:.6e} m^3",
        neutral_volume(TRIMMED_TOTAL_MASS, FRESH_WATER_DENSITY)
    );

    let report = calibrate(&robot, &inventory)?;
    println!("{}", serde_json::to_string_pretty(&report)?);

    // A lighter hull build: the selector picks the closest reachable total.
    let lighter = RobotParams { dry_mass: 5.83, ..robot };
    let report = calibrate(&lighter, &inventory)?;
    println!(
        "dry 5.83 kg -> need {:.3} kg, pick {:?} (off by {:.3} kg)",
        report.neutral_ballast, report.selection.weights, report.selection.error
    );

    let mixed = WeightInventory {
        items: vec![
            WeightItem { mass: 0.05, count: 6 },
            WeightItem { mass: 0.2, count: 4 },
            WeightItem { mass: 1.0, count: 3 },
        ],
    };
    for need in [0.37, 1.12, 2.5, 9.0] {
        let s = trim_select(need, &mixed)?;
        println!("need {need:>4} kg -> {:?} = {:.2} kg", s.weights, s.total);
    }
    Ok(())
}
