use std::collections::BTreeSet;

use nalgebra::Vector3;
use proptest::prelude::*;

use flagella_sim::geometry::{dodecahedron_mounts, pair_axis_gram, pair_of, FrameParams, ARM_COUNT, PHI};

/// The 20 dodecahedron vertices: (±1, ±1, ±1) and cyclic permutations of
/// (0, ±φ, ±1/φ).
fn vertices() -> Vec<Vector3<f64>> {
    let mut v = Vec::new();
    for sx in [1.0, -1.0] {
        for sy in [1.0, -1.0] {
            for sz in [1.0, -1.0] {
                v.push(Vector3::new(sx, sy, sz));
            }
        }
    }
    for a in [PHI, -PHI] {
        for b in [1.0 / PHI, -1.0 / PHI] {
            v.push(Vector3::new(0.0, a, b));
            v.push(Vector3::new(a, b, 0.0));
            v.push(Vector3::new(b, 0.0, a));
        }
    }
    v
}

/// Face normals found by brute force: every plane through three vertices
/// that has all vertices on one side and touches exactly five is a face.
fn hull_face_normals() -> Vec<Vector3<f64>> {
    let v = vertices();
    let mut faces: Vec<Vector3<f64>> = Vec::new();
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            for k in j + 1..v.len() {
                let n = (v[j] - v[i]).cross(&(v[k] - v[i]));
                if n.norm() < 1e-9 {
                    continue;
                }
                let mut n = n.normalize();
                let d = n.dot(&v[i]);
                let (n, d) = if d < 0.0 {
                    n = -n;
                    (n, -d)
                } else {
                    (n, d)
                };
                let on_plane = v.iter().filter(|p| (n.dot(p) - d).abs() < 1e-9).count();
                let outside = v.iter().any(|p| n.dot(p) > d + 1e-9);
                if on_plane == 5 && !outside && !faces.iter().any(|f| (f - n).norm() < 1e-9) {
                    faces.push(n);
                }
            }
        }
    }
    faces
}

#[test]
fn mount_axes_are_the_hull_faces() {
    let faces = hull_face_normals();
    assert_eq!(faces.len(), 12);
    let mounts = dodecahedron_mounts(&FrameParams::default());
    for m in &mounts {
        assert!(faces.iter().any(|f| (f - m.axis).norm() < 1e-12), "arm {} axis not a face normal", m.index);
    }
}

#[test]
fn neighbouring_faces_meet_at_the_dihedral_cosine() {
    let faces = hull_face_normals();
    let mounts = dodecahedron_mounts(&FrameParams::default());
    let target = 1.0 / 5f64.sqrt();
    for a in &mounts {
        for b in &mounts {
            let d = a.axis.dot(&b.axis);
            if a.index == b.index {
                assert!((d - 1.0).abs() < 1e-12);
            } else if a.pair_id == b.pair_id {
                assert!((d + 1.0).abs() < 1e-12);
            } else {
                assert!((d.abs() - target).abs() < 1e-12, "arms {} {}: {d}", a.index, b.index);
            }
        }
    }
    // Same check on the vertex-built normals, so the value is not circular.
    for (i, a) in faces.iter().enumerate() {
        for b in &faces[i + 1..] {
            let d = a.dot(b);
            assert!((d.abs() - target).abs() < 1e-12 || (d + 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn pair_axes_form_a_tight_frame() {
    let gram = pair_axis_gram(&dodecahedron_mounts(&FrameParams::default()));
    assert!((gram - nalgebra::Matrix3::identity() * 2.0).norm() < 1e-12);
}

#[test]
fn pair_of_examples() {
    assert_eq!(pair_of(0).unwrap(), pair_of(6).unwrap());
    assert_ne!(pair_of(3).unwrap(), pair_of(4).unwrap());
    let mounts = dodecahedron_mounts(&FrameParams::default());
    assert!((mounts[3].axis + mounts[4].axis).norm() > 0.5);
    let counts = (0..ARM_COUNT).fold([0; 6], |mut acc, i| {
        acc[pair_of(i).unwrap()] += 1;
        acc
    });
    assert_eq!(counts, [2; 6]);
    assert!(pair_of(12).is_err());
}

#[test]
fn pairs_share_chirality_and_oppose_wiring() {
    let mounts = dodecahedron_mounts(&FrameParams::default());
    let chiralities: BTreeSet<i8> = mounts.iter().map(|m| m.handedness).collect();
    assert_eq!(chiralities, BTreeSet::from([-1, 1]));
    for m in &mounts[..6] {
        let partner = &mounts[m.index + 6];
        assert_eq!(m.handedness, partner.handedness);
        assert_eq!(m.polarity, -partner.polarity);
    }
}

proptest! {
    #[test]
    fn mounts_scale_with_frame(radius in 0.01f64..2.0, offset in 0.001f64..0.5) {
        let frame = FrameParams { frame_radius: radius, arm_root_offset: offset };
        let mounts = dodecahedron_mounts(&frame);
        let sum = mounts.iter().fold(Vector3::zeros(), |acc, m| acc + m.axis);
        prop_assert!(sum.norm() < 1e-12);
        for m in &mounts {
            prop_assert!((m.axis.norm() - 1.0).abs() < 1e-12);
            prop_assert!((m.mount_point - m.axis * frame.mount_radius()).norm() < 1e-12);
        }
        prop_assert_eq!(mounts, dodecahedron_mounts(&frame));
    }
}
