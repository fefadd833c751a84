//! Closed-form inverse kinematics by kinematic decoupling.
//!
//! The wrist centre is recovered by stepping back from the pen tip along the
//! approach vector. The yaw, shoulder and elbow angles then follow from
//! planar two-link geometry. The last three angles come from the residual
//! rotation `³R₆ = (⁰R₃)ᵀ·⁰R₆`, whose structure is
//!
//! ```text
//! | c4c5c6 − s4s6   −c4c5s6 − s4c6   −c4s5 |
//! | s4c5c6 + c4s6   −s4c5s6 + c4c6   −s4s5 |
//! | s5c6            −s5s6             c5   |
//! ```

use std::f64::consts::FRAC_PI_2;

use thiserror::Error;

use super::dh::{dh_transform, shoulder_elbow_frame, DhRow};
use super::geometry::{ArmGeometry, JointAngles};
use super::transform::Transform4;

/// Tolerance on cosine arguments before a pose is declared unreachable.
pub const COSINE_TOLERANCE: f64 = 1e-9;

/// `|sin q5|` below which the wrist is treated as singular.
pub const WRIST_SINGULARITY: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum KinematicsError {
    #[error("target out of reach: law-of-cosines argument {cosine:.6} outside [-1, 1]")]
    Unreachable { cosine: f64 },
    #[error("wrist singularity (|sin q5| = {sin_q5:.2e}) and no previous posture to resolve q4")]
    Singular { sin_q5: f64 },
}

fn clamp_unit(x: f64) -> Result<f64, KinematicsError> {
    if x.abs() <= 1.0 {
        Ok(x)
    } else if x.abs() <= 1.0 + COSINE_TOLERANCE {
        Ok(x.signum())
    } else {
        Err(KinematicsError::Unreachable { cosine: x })
    }
}

/// Joint angles that put the pen tip on `target`.
///
/// The wrist branch with `sin q5 > 0` is returned, so `q5 ∈ (0, π)`. `prev`
/// is consulted only when the solution is locally undetermined: at the wrist
/// singularity `q4` is held at `prev.q4`, and with the wrist centre on the
/// base axis `q1` is held at `prev.q1`.
pub fn inverse_kinematics(
    target: &Transform4,
    g: &ArmGeometry,
    prev: Option<&JointAngles>,
) -> Result<JointAngles, KinematicsError> {
    let approach = target.a();
    let wrist = target.p - g.hand * approach;

    let radial = wrist.x.hypot(wrist.y);
    let q1 = if radial < 1e-12 {
        prev.map_or(0.0, |p| p[0])
    } else {
        wrist.y.atan2(wrist.x)
    };

    let height = wrist.z - g.trunk;
    let l2 = g.upper_arm;
    let l34 = g.elbow_to_wrist();
    let elbow_bias = g.forearm.atan2(g.elbow_offset);

    let cos_flex =
        clamp_unit((radial * radial + height * height - l2 * l2 - l34 * l34) / (2.0 * l2 * l34))?;
    let flex = cos_flex.acos();
    let q3 = -elbow_bias - flex;

    // Upper-arm elevation is the wrist elevation minus the angle the forearm
    // subtends at the shoulder; q2 measures from vertical.
    let forearm_angle = (l34 * flex.sin()).atan2(l2 + l34 * flex.cos());
    let wrist_elevation = height.atan2(radial);
    let q2 = FRAC_PI_2 - wrist_elevation + forearm_angle;

    let partial = JointAngles::new(q1, q2, q3, 0.0, 0.0, 0.0);
    let base_to_elbow = shoulder_elbow_frame(&partial, g);
    let residual = base_to_elbow.r.transpose() * target.r;

    let (ax, ay, az) = (residual[(0, 2)], residual[(1, 2)], residual[(2, 2)]);
    let sin_q5 = ax.hypot(ay);
    let q5 = sin_q5.atan2(az);

    let (q4, q6) = if sin_q5 < WRIST_SINGULARITY {
        let q4 = match prev {
            Some(p) => p[3],
            None => return Err(KinematicsError::Singular { sin_q5 }),
        };
        // With q4 pinned, whatever rotation is left about z5 is q6.
        let r34 = dh_transform(&DhRow::new(q4, 0.0, 0.0, FRAC_PI_2)).r;
        let r45 = dh_transform(&DhRow::new(q5, 0.0, 0.0, -FRAC_PI_2)).r;
        let r56 = (r34 * r45).transpose() * residual;
        (q4, r56[(1, 0)].atan2(r56[(0, 0)]))
    } else {
        // a = (−c4s5, −s4s5, c5) and s5 > 0.
        let q4 = (-ay).atan2(-ax);
        // Third row is (s5c6, −s5s6, c5).
        let q6 = (-residual[(2, 1)]).atan2(residual[(2, 0)]);
        (q4, q6)
    };

    Ok(JointAngles::new(q1, q2, q3, q4, q5, q6))
}

/// Whether `q` lies on the branch [`inverse_kinematics`] returns: elbow
/// flexion in `(0, π)`, `q5` in `(0, π)`, wrist centre in front of the
/// trunk (positive reach along the yaw direction) and all angles in
/// `(−π, π]`.
pub fn in_solution_branch(q: &JointAngles, g: &ArmGeometry) -> bool {
    use std::f64::consts::PI;
    let principal = q.0.iter().all(|a| *a > -PI && *a <= PI);
    let flex = q.elbow_flexion(g);
    let mut planar = *q;
    planar[0] = 0.0;
    let reach = super::dh::forward_positions(&planar, g).wrist().x;
    principal && flex > 0.0 && flex < PI && q[4] > 0.0 && q[4] < PI && reach > 0.0
}
