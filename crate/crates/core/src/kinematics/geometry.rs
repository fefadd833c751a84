use std::f64::consts::PI;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use super::dh::forward_positions;
use super::transform::{Mat3, Vec3};

/// Writing posture the arm starts every signature from.
pub const INITIAL_POSTURE: JointAngles =
    JointAngles([0.0, 3.0 * PI / 4.0, -2.0 * PI / 3.0, 0.0, PI / 2.0, 0.0]);

/// Pen-tip position (mm, base frame) that [`INITIAL_POSTURE`] must reach.
pub const INITIAL_PEN_POSITION: [f64; 3] = [475.29, 0.0, -73.65];

/// Link lengths of the virtual arm, in millimetres.
///
/// | field          | link                                   |
/// |----------------|----------------------------------------|
/// | `trunk`        | L1, base to shoulder                   |
/// | `upper_arm`    | L2, humerus                            |
/// | `elbow_offset` | L3, lateral elbow offset               |
/// | `forearm`      | L4, ulna/radius                        |
/// | `hand`         | L5, wrist to pen tip                   |
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArmGeometry {
    pub trunk: f64,
    pub upper_arm: f64,
    pub elbow_offset: f64,
    pub forearm: f64,
    pub hand: f64,
    /// Constant translation from the base frame to the writing-surface frame.
    pub surface_offset: [f64; 3],
}

impl ArmGeometry {
    /// IRB 120 link lengths before checkpoint calibration.
    pub const IRB120: ArmGeometry = ArmGeometry {
        trunk: 290.0,
        upper_arm: 270.0,
        elbow_offset: 70.0,
        forearm: 302.0,
        hand: 72.0,
        surface_offset: [0.0; 3],
    };

    pub fn new(trunk: f64, upper_arm: f64, elbow_offset: f64, forearm: f64, hand: f64) -> Self {
        Self {
            trunk,
            upper_arm,
            elbow_offset,
            forearm,
            hand,
            surface_offset: [0.0; 3],
        }
    }

    /// IRB 120 trunk, upper arm and elbow offset, with forearm and hand
    /// solved so that the initial posture puts the pen tip on
    /// [`INITIAL_PEN_POSITION`].
    pub fn calibrated() -> Self {
        calibrate_to_checkpoint(&Self::IRB120)
    }

    /// Effective elbow-to-wrist length `sqrt(L3² + L4²)`.
    pub fn elbow_to_wrist(&self) -> f64 {
        self.elbow_offset.hypot(self.forearm)
    }

    pub fn surface_offset(&self) -> Vec3 {
        Vec3::from(self.surface_offset)
    }

    pub fn is_valid(&self) -> bool {
        [
            self.trunk,
            self.upper_arm,
            self.elbow_offset,
            self.forearm,
            self.hand,
        ]
        .iter()
        .all(|l| l.is_finite() && *l > 0.0)
    }
}

impl Default for ArmGeometry {
    fn default() -> Self {
        Self::calibrated()
    }
}

/// Solves for `(forearm, hand)` so that `forward_positions(INITIAL_POSTURE).p6`
/// equals [`INITIAL_PEN_POSITION`] in its x and z components.
///
/// With the joint angles fixed the tip position is affine in the link
/// lengths, so Newton's method with a finite-difference Jacobian converges
/// in one step; the loop only mops up rounding.
pub fn calibrate_to_checkpoint(base: &ArmGeometry) -> ArmGeometry {
    let target = Vec3::from(INITIAL_PEN_POSITION);
    let residual = |g: &ArmGeometry| {
        let p = forward_positions(&INITIAL_POSTURE, g).tip();
        nalgebra::Vector2::new(p.x - target.x, p.z - target.z)
    };

    let mut g = *base;
    for _ in 0..8 {
        let r0 = residual(&g);
        if r0.amax() < 1e-12 {
            break;
        }
        let h = 1.0;
        let mut gf = g;
        gf.forearm += h;
        let mut gh = g;
        gh.hand += h;
        let jf = (residual(&gf) - r0) / h;
        let jh = (residual(&gh) - r0) / h;
        let jac = nalgebra::Matrix2::from_columns(&[jf, jh]);
        let Some(inv) = jac.try_inverse() else { break };
        let step = inv * r0;
        g.forearm -= step.x;
        g.hand -= step.y;
    }
    g
}

/// The six joint angles `q1..q6`, in radians.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct JointAngles(pub [f64; 6]);

impl JointAngles {
    pub fn new(q1: f64, q2: f64, q3: f64, q4: f64, q5: f64, q6: f64) -> Self {
        Self([q1, q2, q3, q4, q5, q6])
    }

    pub fn as_array(&self) -> &[f64; 6] {
        &self.0
    }

    /// Elbow flexion: zero when fully extended, approaching π when fully
    /// contracted.
    pub fn elbow_flexion(&self, g: &ArmGeometry) -> f64 {
        -self.0[2] - g.forearm.atan2(g.elbow_offset)
    }

    pub fn max_abs_diff(&self, other: &JointAngles) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl Index<usize> for JointAngles {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for JointAngles {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

/// Origins of frames `S0..S6` expressed in the base frame (mm).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointPositions(pub [Vec3; 7]);

impl JointPositions {
    pub fn elbow(&self) -> Vec3 {
        self.0[2]
    }

    pub fn wrist(&self) -> Vec3 {
        self.0[5]
    }

    pub fn tip(&self) -> Vec3 {
        self.0[6]
    }
}

impl Index<usize> for JointPositions {
    type Output = Vec3;

    fn index(&self, i: usize) -> &Vec3 {
        &self.0[i]
    }
}

/// `‖RᵀR − I‖∞` and `det R` helper for tests across the crate.
pub fn rotation_defects(r: &Mat3) -> (f64, f64) {
    (
        (r.transpose() * r - Mat3::identity()).amax(),
        r.determinant(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn calibration_hits_checkpoint() {
        let g = ArmGeometry::calibrated();
        let tip = forward_positions(&INITIAL_POSTURE, &g).tip();
        let target = Vec3::from(INITIAL_PEN_POSITION);
        assert!((tip - target).amax() < 1e-9, "tip = {tip:?}");
        assert_eq!(g.trunk, 290.0);
        assert_eq!(g.upper_arm, 270.0);
        assert_eq!(g.elbow_offset, 70.0);
        assert!(g.is_valid());
    }

    #[test]
    fn irb120_lengths_alone_miss_checkpoint() {
        // No hand length brings the uncalibrated arm onto the checkpoint:
        // the pen axis passes ~17.4 mm away from it.
        let g = ArmGeometry::IRB120;
        let t = super::super::dh::forward_pose(&INITIAL_POSTURE, &g);
        let wrist = t.p - g.hand * t.a();
        let target = Vec3::from(INITIAL_PEN_POSITION);
        let along = (target - wrist).dot(&t.a());
        let miss = (wrist + along * t.a() - target).norm();
        assert!((miss - 17.3876).abs() < 1e-3, "miss = {miss}");
    }

    #[test]
    fn initial_posture_elbow_in_human_range() {
        let g = ArmGeometry::calibrated();
        let f = INITIAL_POSTURE.elbow_flexion(&g);
        assert!(f > 0.1 * PI && f < PI);
    }
}
