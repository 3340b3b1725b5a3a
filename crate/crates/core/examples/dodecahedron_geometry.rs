//! Prints the twelve arm mounts and checks the pair structure.
//!
//! `cargo run --example dodecahedron_geometry`

use flagella_sim::geometry::{dodecahedron_mounts, pair_axis_gram, FrameParams};

fn main() {
    let frame = FrameParams::default();
    let mounts = dodecahedron_mounts(&frame);
    println!("frame radius {} m, arm roots at {:.3} m", frame.frame_radius, frame.mount_radius());
    println!("arm pair chir pol        axis");
    for m in &mounts {
        println!(
            "{:>3} {:>4} {:>4} {:>3}  [{:+.4} {:+.4} {:+.4}]",
            m.index, m.pair_id, m.handedness, m.polarity, m.axis.x, m.axis.y, m.axis.z
        );
    }
    let angle = mounts[0].axis.dot(&mounts[1].axis).abs().acos().to_degrees();
    println!("angle between neighbouring pair axes: {angle:.3} deg");
    println!("pair-axis Gram matrix (2I for a tight frame):{}", pair_axis_gram(&mounts));
}
