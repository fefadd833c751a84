use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::config::{ExtractionConfig, PEN_UP_Q6_BUMP};
use super::preprocess::preprocess;
use super::FeatureError;
use crate::kinematics::{
    forward_positions, inverse_kinematics, pen_pose_matrix, ArmGeometry, JointAngles, Vec3,
    INITIAL_POSTURE,
};
use crate::trajectory::SignatureTrajectory;

/// Per-sample joint angles and the three moving joint positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnthroSequence {
    pub angles: Vec<JointAngles>,
    pub elbow: Vec<Vec3>,
    pub wrist: Vec<Vec3>,
    pub finger: Vec<Vec3>,
}

impl AnthroSequence {
    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    /// Nine position channels per sample: elbow, wrist, finger xyz.
    pub fn position_rows(&self) -> Vec<[f64; 9]> {
        self.elbow
            .iter()
            .zip(&self.wrist)
            .zip(&self.finger)
            .map(|((e, w), f)| [e.x, e.y, e.z, w.x, w.y, w.z, f.x, f.y, f.z])
            .collect()
    }

    pub fn angle_rows(&self) -> Vec<[f64; 6]> {
        self.angles.iter().map(|q| q.0).collect()
    }
}

/// Shifts `angle` by a multiple of 2π so it lands within π of `reference`.
pub fn unwrap_near(angle: f64, reference: f64) -> f64 {
    let turns = ((reference - angle) / TAU).round();
    let out = angle + turns * TAU;
    // round() ties can leave the result exactly π away; either side is fine.
    debug_assert!((out - reference).abs() <= PI + 1e-9);
    out
}

/// Runs inverse kinematics sample by sample on an already preprocessed
/// trajectory.
///
/// The arm starts from the initial posture, which also seeds branch
/// continuity for the first sample. Angle channels are unwrapped against the
/// previous sample; pen-up samples flagged for the hand-joint bump get +1°
/// after the solve.
pub fn extract_anthro(
    traj: &SignatureTrajectory,
    g: &ArmGeometry,
) -> Result<AnthroSequence, FeatureError> {
    let n = traj.len();
    let mut angles = Vec::with_capacity(n);
    let mut elbow = Vec::with_capacity(n);
    let mut wrist = Vec::with_capacity(n);
    let mut finger = Vec::with_capacity(n);

    let mut prev = INITIAL_POSTURE;
    for (index, sample) in traj.samples.iter().enumerate() {
        let target = pen_pose_matrix(sample, g);
        let raw = inverse_kinematics(&target, g, Some(&prev))
            .map_err(|source| FeatureError::Kinematics { index, source })?;
        let mut q = raw;
        for k in 0..6 {
            q[k] = unwrap_near(raw[k], prev[k]);
        }
        prev = q;

        let p = forward_positions(&q, g);
        elbow.push(p.elbow());
        wrist.push(p.wrist());
        finger.push(p.tip());

        if traj.q6_bump.get(index).copied().unwrap_or(false) {
            q[5] += PEN_UP_Q6_BUMP;
        }
        angles.push(q);
    }

    Ok(AnthroSequence {
        angles,
        elbow,
        wrist,
        finger,
    })
}

/// Full pipeline from a raw trajectory: preprocessing then extraction.
pub fn extract_features(
    traj: &SignatureTrajectory,
    g: &ArmGeometry,
    config: &ExtractionConfig,
) -> Result<AnthroSequence, FeatureError> {
    let prepared = preprocess(traj, g, config)?;
    extract_anthro(&prepared, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluation::snr;
    use crate::features::config::PenUpMode;
    use crate::kinematics::forward_pose;
    use crate::trajectory::{Label, PenSample};

    fn stroke(n: usize) -> SignatureTrajectory {
        let samples = (0..n)
            .map(|i| {
                let t = i as f64 / n as f64;
                let down = (i / 15) % 4 != 3;
                PenSample::at(
                    10.0 * i as f64,
                    40.0 * (3.0 * t).sin() + 30.0 * t,
                    15.0 * (7.0 * t).cos(),
                    down,
                )
            })
            .collect();
        SignatureTrajectory::new("s", "1", Label::Genuine, samples)
    }

    #[test]
    fn unwrapping_removes_full_turns() {
        assert!((unwrap_near(-3.1, 3.1) - (TAU - 3.1)).abs() < 1e-12);
        assert_eq!(unwrap_near(0.5, 0.4), 0.5);
        assert!((unwrap_near(0.1, 4.0 * PI) - (0.1 + 4.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn first_sample_reproduces_anchor() {
        let g = ArmGeometry::calibrated();
        let cfg = ExtractionConfig::default();
        let prepared = preprocess(&stroke(60), &g, &cfg).unwrap();
        let seq = extract_anthro(&prepared, &g).unwrap();
        // FK oracle: the solved first posture puts the tip on the anchored
        // start with the configured pen orientation.
        let t = forward_pose(&seq.angles[0], &g);
        let want = pen_pose_matrix(&prepared.samples[0], &g);
        assert!((t.p - want.p).amax() < 1e-9);
        assert!((t.r - want.r).norm() < 1e-9);
    }

    #[test]
    fn initial_orientation_recovers_initial_posture() {
        // A pen oriented exactly as in the initial posture gives the initial
        // posture back on the first sample.
        let g = ArmGeometry::calibrated();
        let start = forward_pose(&INITIAL_POSTURE, &g);
        let mut prepared = stroke(5);
        prepared.samples[0].x = start.p.x;
        prepared.samples[0].y = start.p.y;
        prepared.samples[0].z = start.p.z;
        let target = pen_pose_matrix(&prepared.samples[0], &g);
        let q = inverse_kinematics(
            &crate::kinematics::Transform4::new(start.r, target.p),
            &g,
            Some(&INITIAL_POSTURE),
        )
        .unwrap();
        assert!(q.max_abs_diff(&INITIAL_POSTURE) < 1e-9);
    }

    #[test]
    fn stationary_trajectory_gives_constant_angles() {
        let g = ArmGeometry::calibrated();
        let samples = (0..10)
            .map(|i| PenSample::at(i as f64, 1.0, 2.0, true))
            .collect();
        let traj = SignatureTrajectory::new("s", "1", Label::Genuine, samples);
        let seq = extract_features(&traj, &g, &ExtractionConfig::default()).unwrap();
        for q in &seq.angles {
            assert_eq!(q, &seq.angles[0]);
        }
    }

    #[test]
    fn reconstruction_snr_is_high() {
        let g = ArmGeometry::calibrated();
        let cfg = ExtractionConfig::default();
        let prepared = preprocess(&stroke(200), &g, &cfg).unwrap();
        let seq = extract_anthro(&prepared, &g).unwrap();
        let input = prepared.positions();
        let recon: Vec<[f64; 3]> = seq
            .angles
            .iter()
            .map(|q| forward_positions(q, &g).tip().into())
            .collect();
        assert!(snr(&input, &recon) >= 60.0);
    }

    #[test]
    fn q6_bump_applies_only_on_pen_ups() {
        let g = ArmGeometry::calibrated();
        let base = ExtractionConfig {
            penup_mode: PenUpMode::Flat,
            ..Default::default()
        };
        let bumped = ExtractionConfig {
            penup_mode: PenUpMode::FlatQ6Bump,
            ..Default::default()
        };
        let traj = stroke(80);
        let a = extract_features(&traj, &g, &base).unwrap();
        let b = extract_features(&traj, &g, &bumped).unwrap();
        for (i, s) in traj.samples.iter().enumerate() {
            let dq6 = b.angles[i][5] - a.angles[i][5];
            let want = if s.pen_down { 0.0 } else { PEN_UP_Q6_BUMP };
            assert!((dq6 - want).abs() < 1e-12);
            assert_eq!(a.finger[i], b.finger[i]);
        }
    }

    #[test]
    fn extraction_is_translation_invariant() {
        let g = ArmGeometry::calibrated();
        let cfg = ExtractionConfig::default();
        let a = stroke(50);
        let mut b = a.clone();
        for s in &mut b.samples {
            s.x += 123.0;
            s.y -= 77.0;
        }
        let sa = extract_features(&a, &g, &cfg).unwrap();
        let sb = extract_features(&b, &g, &cfg).unwrap();
        for (qa, qb) in sa.angles.iter().zip(&sb.angles) {
            assert!(qa.max_abs_diff(qb) < 1e-9);
        }
    }

    #[test]
    fn fixed_angles_have_no_wrap_jumps() {
        let g = ArmGeometry::calibrated();
        let seq = extract_features(&stroke(300), &g, &ExtractionConfig::default()).unwrap();
        for w in seq.angles.windows(2) {
            assert!(w[0].max_abs_diff(&w[1]) < PI / 2.0);
        }
    }

    #[test]
    fn unreachable_sample_reports_index() {
        let g = ArmGeometry::calibrated();
        let mut traj = stroke(10);
        traj.samples[6].x += 5000.0;
        match extract_features(&traj, &g, &ExtractionConfig::default()) {
            Err(FeatureError::Kinematics { index, .. }) => assert_eq!(index, 6),
            other => panic!("unexpected {other:?}"),
        }
    }
}
