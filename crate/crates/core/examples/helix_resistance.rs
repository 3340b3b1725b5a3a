//! Resistance coefficients of a rigid helix and how they move with pitch.
//!
//! `cargo run --example helix_resistance`

use flagella_sim::hydro::{helix_resistance, HelixParams};

fn main() -> flagella_sim::Result<()> {
    let base = HelixParams::default();
    let rm = helix_resistance(&base)?;
    println!("default helix: {base:?}");
    println!("A = {:.4e} N s/m   B = {:.4e} N s   C = {:.4e} N m s", rm.a, rm.b, rm.c);

    // Thrust per unit spin peaks near 45 degrees; the axial drag grows as
    // the filament lays down along the axis.
    println!("\n psi(deg)        A          B          C   B/A (m)");
    for deg in (10..=80).step_by(10) {
        let h = HelixParams { pitch_angle: f64::from(deg).to_radians(), ..base };
        let r = helix_resistance(&h)?;
        println!("{deg:>9} {:.3e} {:.3e} {:.3e} {:.3e}", r.a, r.b, r.c, r.b / r.a);
    }

    // A free helix spinning at 20 rad/s in still water pushes, and if it is
    // let go it settles at the speed where thrust meets its own drag.
    let omega = 20.0;
    let (f, tau) = rm.axial_load(1.0, 0.0, omega);
    println!("\nheld at 20 rad/s: thrust {f:.4} N, shaft torque {tau:.3e} N m");
    println!("free swimming speed at 20 rad/s: {:.4} m/s", rm.b * omega / rm.a);
    Ok(())
}
