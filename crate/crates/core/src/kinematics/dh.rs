//! Denavit-Hartenberg chain of the six-joint arm and its forward kinematics.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::geometry::{ArmGeometry, JointAngles, JointPositions};
use super::transform::{Mat3, Transform4, Vec3};

/// One row of the DH table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DhRow {
    /// Joint angle about `z_{k-1}` (rad).
    pub delta: f64,
    /// Offset along `z_{k-1}` (mm).
    pub d: f64,
    /// Offset along `x_k` (mm).
    pub a: f64,
    /// Twist about `x_k` (rad).
    pub alpha: f64,
}

impl DhRow {
    pub const fn new(delta: f64, d: f64, a: f64, alpha: f64) -> Self {
        Self { delta, d, a, alpha }
    }
}

/// Standard DH link transform `Rz(δ)·Tz(d)·Tx(a)·Rx(α)`.
pub fn dh_transform(row: &DhRow) -> Transform4 {
    let (sd, cd) = row.delta.sin_cos();
    let (sa, ca) = row.alpha.sin_cos();
    Transform4::new(
        Mat3::new(cd, -ca * sd, sa * sd, sd, ca * cd, -sa * cd, 0.0, sa, ca),
        Vec3::new(row.a * cd, row.a * sd, row.d),
    )
}

/// DH parameters for a given posture. Only `delta` depends on the angles;
/// joint 2 carries a fixed −π/2 offset.
pub fn dh_table(q: &JointAngles, g: &ArmGeometry) -> [DhRow; 6] {
    [
        DhRow::new(q[0], g.trunk, 0.0, -FRAC_PI_2),
        DhRow::new(q[1] - FRAC_PI_2, 0.0, g.upper_arm, 0.0),
        DhRow::new(q[2], 0.0, g.elbow_offset, -FRAC_PI_2),
        DhRow::new(q[3], g.forearm, 0.0, FRAC_PI_2),
        DhRow::new(q[4], 0.0, 0.0, -FRAC_PI_2),
        DhRow::new(q[5], g.hand, 0.0, 0.0),
    ]
}

/// Cumulative frames `⁰T_1 .. ⁰T_6`.
pub fn forward_frames(q: &JointAngles, g: &ArmGeometry) -> [Transform4; 6] {
    let table = dh_table(q, g);
    let mut frames = [Transform4::identity(); 6];
    let mut acc = Transform4::identity();
    for (frame, row) in frames.iter_mut().zip(table.iter()) {
        acc = acc.compose(&dh_transform(row));
        *frame = acc;
    }
    frames
}

/// Pen-tip pose `⁰T_6`.
pub fn forward_pose(q: &JointAngles, g: &ArmGeometry) -> Transform4 {
    forward_frames(q, g)[5]
}

/// `⁰T_3`, the frame the wrist orientation is solved in.
pub fn shoulder_elbow_frame(q: &JointAngles, g: &ArmGeometry) -> Transform4 {
    let table = dh_table(q, g);
    table[..3].iter().fold(Transform4::identity(), |acc, row| {
        acc.compose(&dh_transform(row))
    })
}

/// Positions of all seven frame origins; `p0` is the base origin.
pub fn forward_positions(q: &JointAngles, g: &ArmGeometry) -> JointPositions {
    let frames = forward_frames(q, g);
    let mut p = [Vec3::zeros(); 7];
    for (k, f) in frames.iter().enumerate() {
        p[k + 1] = f.p;
    }
    JointPositions(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::geometry::{rotation_defects, INITIAL_PEN_POSITION, INITIAL_POSTURE};
    use crate::kinematics::transform::rot_z;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn zero_row_is_identity() {
        assert_eq!(
            dh_transform(&DhRow::new(0.0, 0.0, 0.0, 0.0)),
            Transform4::identity()
        );
    }

    #[test]
    fn twist_row_substitution() {
        let t = dh_transform(&DhRow::new(0.0, 290.0, 0.0, -FRAC_PI_2));
        // Rx(−π/2): y ↦ −z, z ↦ y.
        let expected = Mat3::new(1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, -1.0, 0.0);
        assert!((t.r - expected).amax() < 1e-15);
        assert_eq!(t.p, Vec3::new(0.0, 0.0, 290.0));
        assert!((t.r.determinant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rotation_row_substitution() {
        let t = dh_transform(&DhRow::new(FRAC_PI_2, 0.0, 5.0, 0.0));
        assert!((t.r - rot_z(FRAC_PI_2)).amax() < 1e-15);
        assert!((t.p - Vec3::new(0.0, 5.0, 0.0)).amax() < 1e-12);
    }

    #[test]
    fn table_layout() {
        let g = ArmGeometry::calibrated();
        let zero = dh_table(&JointAngles::default(), &g);
        assert_eq!(zero[1].delta, -FRAC_PI_2);
        assert_eq!(zero[0], DhRow::new(0.0, g.trunk, 0.0, -FRAC_PI_2));

        let mut q = JointAngles::default();
        q[0] = 1.0;
        let t = dh_table(&q, &g);
        assert_eq!(t[0].delta, 1.0);
        for (a, b) in t.iter().zip(zero.iter()).skip(1) {
            assert_eq!((a.d, a.a, a.alpha), (b.d, b.a, b.alpha));
        }

        let mut q = JointAngles::default();
        q[5] = 0.3;
        assert_eq!(dh_table(&q, &g)[5], DhRow::new(0.3, g.hand, 0.0, 0.0));
    }

    #[test]
    fn initial_posture_checkpoint() {
        let p = forward_positions(&INITIAL_POSTURE, &ArmGeometry::calibrated());
        for (got, want) in p.tip().iter().zip(INITIAL_PEN_POSITION.iter()) {
            assert!((got - want).abs() < 0.05, "{got} vs {want}");
        }
    }

    #[test]
    fn base_chain_is_fixed() {
        let g = ArmGeometry::calibrated();
        let q = JointAngles::new(0.4, 1.0, -2.0, 0.3, 1.2, -0.5);
        let p = forward_positions(&q, &g);
        assert_eq!(p[0], Vec3::zeros());
        assert!((p[1] - Vec3::new(0.0, 0.0, g.trunk)).amax() < 1e-12);
    }

    #[test]
    fn yaw_joint_rotates_about_base_z() {
        let g = ArmGeometry::calibrated();
        let q0 = JointAngles::new(0.0, 2.0, -2.1, 0.0, 1.1, 0.0);
        let mut q1 = q0;
        q1[0] = PI / 2.0;
        let a = forward_positions(&q0, &g).tip();
        let b = forward_positions(&q1, &g).tip();
        assert!((rot_z(PI / 2.0) * a - b).amax() < 1e-9);
    }

    proptest! {
        #[test]
        fn link_lengths_are_preserved(q in proptest::array::uniform6(-PI..PI)) {
            let g = ArmGeometry::calibrated();
            let p = forward_positions(&JointAngles(q), &g);
            prop_assert!(((p[2] - p[1]).norm() - g.upper_arm).abs() < 1e-9);
            prop_assert!(((p[5] - p[3]).norm() - g.forearm).abs() < 1e-9);
            prop_assert!(((p[6] - p[5]).norm() - g.hand).abs() < 1e-9);
            prop_assert!((p[4] - p[5]).norm() < 1e-9);
        }

        #[test]
        fn dh_blocks_are_proper_rotations(
            delta in -PI..PI, d in -500.0..500.0f64, a in -500.0..500.0f64, alpha in -PI..PI
        ) {
            let (orth, det) = rotation_defects(&dh_transform(&DhRow::new(delta, d, a, alpha)).r);
            prop_assert!(orth < 1e-9);
            prop_assert!((det - 1.0).abs() < 1e-9);
        }

        #[test]
        fn yaw_offset_rotates_every_joint(
            q in proptest::array::uniform6(-PI..PI), dq in -PI..PI
        ) {
            let g = ArmGeometry::calibrated();
            let mut shifted = q;
            shifted[0] += dq;
            let a = forward_positions(&JointAngles(q), &g);
            let b = forward_positions(&JointAngles(shifted), &g);
            for k in 1..7 {
                prop_assert!((rot_z(dq) * a[k] - b[k]).amax() < 1e-9);
                prop_assert!((a[k].z - b[k].z).abs() < 1e-9);
            }
        }
    }
}
