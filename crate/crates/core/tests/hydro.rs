use nalgebra::Vector3;
use proptest::prelude::*;

use flagella_sim::geometry::{dodecahedron_mounts, ArmMount, FrameParams, PAIR_COUNT};
use flagella_sim::hydro::{arm_wrench, helix_resistance, HelixParams, PreparedThrust, ThrustModel, WrenchBody};

const REFERENCE_HELIX: HelixParams = HelixParams {
    radius: 0.02,
    pitch_angle: 0.6,
    contour_length: 0.15,
    drag_normal: 1.0,
    drag_tangential: 0.5,
};

fn still() -> Vector3<f64> {
    Vector3::zeros()
}

fn pair_wrench(mounts: &[ArmMount], thrust: &PreparedThrust, pair: usize, omega: f64) -> WrenchBody {
    arm_wrench(&mounts[pair], thrust, omega, &still(), &still())
        + arm_wrench(&mounts[pair + PAIR_COUNT], thrust, omega, &still(), &still())
}

#[test]
fn reference_helix_coefficients() {
    // Frozen from a 10^6-chord discretisation of the same helix.
    let rm = helix_resistance(&REFERENCE_HELIX).unwrap();
    for (got, want) in [(rm.a, 1.260_884_157_93e-1), (rm.b, 6.990_293_144_7e-4), (rm.c, 3.956_463_368_2e-5)] {
        assert!((got - want).abs() < 1e-9 * want, "{got} vs {want}");
    }
}

#[test]
fn equal_duty_pair_thrusts_along_its_axis() {
    let mounts = dodecahedron_mounts(&FrameParams::default());
    let thrust = ThrustModel::ResistiveHelix(REFERENCE_HELIX).prepare().unwrap();
    let b = helix_resistance(&REFERENCE_HELIX).unwrap().b;
    let omega = 25.0;
    for pair in 0..PAIR_COUNT {
        let w = pair_wrench(&mounts, &thrust, pair, omega);
        let h = f64::from(mounts[pair].handedness);
        let expected = mounts[pair].axis * (2.0 * h * b * omega);
        assert!((w.force - expected).norm() < 1e-12 * expected.norm());
        // Thrust lines pass through the center of mass, so any torque is the
        // shaft reaction along the pair axis.
        assert!(w.torque.cross(&mounts[pair].axis).norm() < 1e-15);
    }
}

#[test]
fn pair_shaft_reactions_add_along_the_axis() {
    // The opposed wiring makes both shafts of a pair turn the same way about
    // the pair axis, so their reactions add. Cancellation comes from driving
    // pairs of both chiralities (see the mixer tests).
    let mounts = dodecahedron_mounts(&FrameParams::default());
    let thrust = ThrustModel::ResistiveHelix(REFERENCE_HELIX).prepare().unwrap();
    let c = helix_resistance(&REFERENCE_HELIX).unwrap().c;
    let omega = 10.0;
    let w = pair_wrench(&mounts, &thrust, 0, omega);
    let expected = -mounts[0].axis * (2.0 * c * omega);
    assert!((w.torque - expected).norm() < 1e-12 * expected.norm());
}

#[test]
fn flipping_one_arm_chirality_kills_thrust() {
    let mut mounts = dodecahedron_mounts(&FrameParams::default());
    let thrust = ThrustModel::ResistiveHelix(REFERENCE_HELIX).prepare().unwrap();
    mounts[PAIR_COUNT].handedness = -mounts[PAIR_COUNT].handedness;
    let w = pair_wrench(&mounts, &thrust, 0, 25.0);
    let reference = pair_wrench(&dodecahedron_mounts(&FrameParams::default()), &thrust, 0, 25.0);
    assert!(w.force.norm() < 1e-12 * reference.force.norm());
    assert!(w.torque.norm() > 1e-3 * reference.force.norm() * FrameParams::default().frame_radius);
}

#[test]
fn isotropic_filament_never_thrusts_at_rest() {
    let h = HelixParams { drag_normal: 0.9, drag_tangential: 0.9, ..REFERENCE_HELIX };
    let rm = helix_resistance(&h).unwrap();
    assert!(rm.b.abs() < 1e-12);
    for omega in [-40.0, -1.0, 0.5, 31.4] {
        assert_eq!(rm.axial_load(1.0, 0.0, omega).0, 0.0);
    }
}

fn helix_strategy() -> impl Strategy<Value = HelixParams> {
    (0.005f64..0.05, 0.1f64..1.45, 0.05f64..0.3, 0.1f64..2.0, 1.0f64..3.0).prop_map(|(r, psi, len, ct, ratio)| {
        HelixParams { radius: r, pitch_angle: psi, contour_length: len, drag_tangential: ct, drag_normal: ct * ratio }
    })
}

fn model_strategy() -> impl Strategy<Value = ThrustModel> {
    prop_oneof![
        helix_strategy().prop_map(ThrustModel::ResistiveHelix),
        (1e-4f64..1e-2, 1e-6f64..1e-4, 1.0f64..40.0)
            .prop_map(|(k_t, k_q, omega_ref)| ThrustModel::LumpedQuadratic { k_t, k_q, omega_ref }),
    ]
}

fn vec3() -> impl Strategy<Value = Vector3<f64>> {
    (-2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0).prop_map(|(x, y, z)| Vector3::new(x, y, z))
}

proptest! {
    #[test]
    fn helix_is_passive(h in helix_strategy(), chirality in prop::sample::select(vec![-1.0, 1.0]),
                        u in -2.0f64..2.0, omega in -50.0f64..50.0) {
        let rm = helix_resistance(&h).unwrap();
        let (f, tau) = rm.axial_load(chirality, u, omega);
        let power = f * u + tau * omega;
        prop_assert!(power <= 1e-12 * (rm.a * u * u + rm.c * omega * omega));
        prop_assert!(rm.determinant() > 0.0);
    }

    #[test]
    fn arm_wrench_is_odd(model in model_strategy(), arm in 0usize..12, omega in -40.0f64..40.0,
                         v in vec3(), w in vec3()) {
        let mounts = dodecahedron_mounts(&FrameParams::default());
        let thrust = model.prepare().unwrap();
        let fwd = arm_wrench(&mounts[arm], &thrust, omega, &v, &w);
        let back = arm_wrench(&mounts[arm], &thrust, -omega, &-v, &-w);
        prop_assert!((fwd.force + back.force).norm() <= 1e-12 * (1.0 + fwd.force.norm()));
        prop_assert!((fwd.torque + back.torque).norm() <= 1e-12 * (1.0 + fwd.torque.norm()));
    }

    #[test]
    fn helix_wrench_is_linear_in_speed(h in helix_strategy(), arm in 0usize..12, omega in -40.0f64..40.0, k in -3.0f64..3.0) {
        let mounts = dodecahedron_mounts(&FrameParams::default());
        let thrust = ThrustModel::ResistiveHelix(h).prepare().unwrap();
        let one = arm_wrench(&mounts[arm], &thrust, omega, &still(), &still());
        let scaled = arm_wrench(&mounts[arm], &thrust, k * omega, &still(), &still());
        prop_assert!((scaled.force - one.force * k).norm() <= 1e-12 * (1.0 + scaled.force.norm()));
        prop_assert!((scaled.torque - one.torque * k).norm() <= 1e-12 * (1.0 + scaled.torque.norm()));
    }
}
