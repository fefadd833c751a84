//! Trajectory conditioning ahead of inverse kinematics.

use super::config::{ExtractionConfig, PenAngleMode, PenUpMode, Scale, PEN_UP_HEIGHT};
use super::FeatureError;
use crate::kinematics::{forward_positions, rotate_writing_plane, ArmGeometry, INITIAL_POSTURE};
use crate::trajectory::SignatureTrajectory;

/// Span of the centred moving average used for [`PenAngleMode::Smoothed`].
pub const SMOOTHING_SPAN: usize = 15;

/// Centred moving average; the window shrinks near either end.
pub fn moving_average(values: &[f64], span: usize) -> Vec<f64> {
    let half = span / 2;
    let n = values.len();
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(n.saturating_sub(1));
            let window = &values[lo..=hi];
            window.iter().sum::<f64>() / window.len() as f64
        })
        .collect()
}

pub fn resolve_pen_angles(
    traj: &SignatureTrajectory,
    config: &ExtractionConfig,
) -> Result<SignatureTrajectory, FeatureError> {
    let mut out = traj.clone();
    match config.pen_angle_mode {
        PenAngleMode::Fixed => {
            for s in &mut out.samples {
                s.theta = config.fixed_theta;
                s.phi = config.fixed_phi;
            }
        }
        PenAngleMode::Raw => {
            if !traj.has_angles {
                return Err(FeatureError::MissingAngles);
            }
        }
        PenAngleMode::Smoothed => {
            if !traj.has_angles {
                return Err(FeatureError::MissingAngles);
            }
            let theta: Vec<f64> = traj.samples.iter().map(|s| s.theta).collect();
            let phi: Vec<f64> = traj.samples.iter().map(|s| s.phi).collect();
            let theta = moving_average(&theta, SMOOTHING_SPAN);
            let phi = moving_average(&phi, SMOOTHING_SPAN);
            for (s, (t, p)) in out.samples.iter_mut().zip(theta.into_iter().zip(phi)) {
                s.theta = t;
                s.phi = p;
            }
        }
    }
    Ok(out)
}

pub fn apply_penup_lift(traj: &SignatureTrajectory, mode: PenUpMode) -> SignatureTrajectory {
    let mut out = traj.clone();
    for s in &mut out.samples {
        s.z = match mode {
            PenUpMode::Lift5mm if !s.pen_down => PEN_UP_HEIGHT,
            _ => 0.0,
        };
    }
    out.q6_bump = match mode {
        PenUpMode::FlatQ6Bump => traj.samples.iter().map(|s| !s.pen_down).collect(),
        _ => Vec::new(),
    };
    out
}

pub fn apply_scale(traj: &SignatureTrajectory, scale: Scale) -> SignatureTrajectory {
    let k = scale.factor();
    let mut out = traj.clone();
    if k != 1.0 {
        for s in &mut out.samples {
            s.x *= k;
            s.y *= k;
        }
    }
    out
}

pub fn rotate_trajectory(traj: &SignatureTrajectory, gamma: [f64; 3]) -> SignatureTrajectory {
    let mut out = traj.clone();
    for s in &mut out.samples {
        *s = rotate_writing_plane(s, gamma);
    }
    out
}

/// Translates the trajectory so its first sample sits where the initial
/// posture puts the pen tip (relative to the geometry's surface frame).
pub fn anchor_to_workspace(traj: &SignatureTrajectory, g: &ArmGeometry) -> SignatureTrajectory {
    let mut out = traj.clone();
    let Some(first) = traj.samples.first() else {
        return out;
    };
    let start = forward_positions(&INITIAL_POSTURE, g).tip() - g.surface_offset();
    let (dx, dy, dz) = (start.x - first.x, start.y - first.y, start.z - first.z);
    for s in &mut out.samples {
        s.x += dx;
        s.y += dy;
        s.z += dz;
    }
    out
}

/// Angle resolution, pen-up lift, scaling, plane rotation and anchoring, in
/// that order.
pub fn preprocess(
    traj: &SignatureTrajectory,
    g: &ArmGeometry,
    config: &ExtractionConfig,
) -> Result<SignatureTrajectory, FeatureError> {
    if traj.is_empty() {
        return Err(FeatureError::EmptyTrajectory);
    }
    let t = resolve_pen_angles(traj, config)?;
    let t = apply_penup_lift(&t, config.penup_mode);
    let t = apply_scale(&t, config.scale);
    let t = rotate_trajectory(&t, config.gamma);
    Ok(anchor_to_workspace(&t, g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::INITIAL_PEN_POSITION;
    use crate::trajectory::{Label, PenSample};
    use std::f64::consts::PI;

    fn traj(points: &[(f64, f64, bool)]) -> SignatureTrajectory {
        let samples = points
            .iter()
            .enumerate()
            .map(|(i, &(x, y, down))| PenSample::at(10.0 * i as f64, x, y, down))
            .collect();
        SignatureTrajectory::new("s", "1", Label::Genuine, samples)
    }

    fn with_angles(theta: &[f64]) -> SignatureTrajectory {
        let mut t = traj(&vec![(0.0, 0.0, true); theta.len()]);
        for (s, th) in t.samples.iter_mut().zip(theta) {
            s.theta = *th;
            s.phi = 0.5;
        }
        t.has_angles = true;
        t
    }

    #[test]
    fn fixed_mode_overrides_angles() {
        let t = resolve_pen_angles(&with_angles(&[0.1, 0.2, 0.3]), &ExtractionConfig::default())
            .unwrap();
        for s in &t.samples {
            assert_eq!(s.theta, PI / 3.0);
            assert_eq!(s.phi, 3.0 * PI / 4.0);
        }
    }

    #[test]
    fn raw_and_smoothed_need_device_angles() {
        let t = traj(&[(0.0, 0.0, true)]);
        for mode in [PenAngleMode::Raw, PenAngleMode::Smoothed] {
            let cfg = ExtractionConfig {
                pen_angle_mode: mode,
                ..Default::default()
            };
            assert!(matches!(
                resolve_pen_angles(&t, &cfg),
                Err(FeatureError::MissingAngles)
            ));
        }
    }

    #[test]
    fn smoothing_constant_is_identity() {
        let cfg = ExtractionConfig {
            pen_angle_mode: PenAngleMode::Smoothed,
            ..Default::default()
        };
        let src = with_angles(&[0.7; 20]);
        let t = resolve_pen_angles(&src, &cfg).unwrap();
        assert!(t.samples.iter().all(|s| (s.theta - 0.7).abs() < 1e-15));
    }

    #[test]
    fn smoothing_spreads_a_spike() {
        let mut theta = vec![0.0; 16];
        theta[1] = 15.0;
        let cfg = ExtractionConfig {
            pen_angle_mode: PenAngleMode::Smoothed,
            ..Default::default()
        };
        let t = resolve_pen_angles(&with_angles(&theta), &cfg).unwrap();
        // Index 7 has the full 15-sample window 0..=14.
        assert!((t.samples[7].theta - 1.0).abs() < 1e-12);
        // Index 1's window is truncated to 0..=8.
        assert!((t.samples[1].theta - 15.0 / 9.0).abs() < 1e-12);
        // Index 9's window 2..=15 misses the spike.
        assert_eq!(t.samples[9].theta, 0.0);
    }

    #[test]
    fn lift_modes() {
        let down = traj(&[(0.0, 0.0, true), (1.0, 0.0, true)]);
        assert!(apply_penup_lift(&down, PenUpMode::Lift5mm)
            .samples
            .iter()
            .all(|s| s.z == 0.0));

        let alt = traj(&[
            (0.0, 0.0, true),
            (1.0, 0.0, false),
            (2.0, 0.0, true),
            (3.0, 0.0, false),
        ]);
        let z: Vec<f64> = apply_penup_lift(&alt, PenUpMode::Lift5mm)
            .samples
            .iter()
            .map(|s| s.z)
            .collect();
        assert_eq!(z, vec![0.0, 5.0, 0.0, 5.0]);

        let flat = apply_penup_lift(&alt, PenUpMode::Flat);
        assert!(flat.samples.iter().all(|s| s.z == 0.0));
        assert!(flat.q6_bump.is_empty());

        let bump = apply_penup_lift(&alt, PenUpMode::FlatQ6Bump);
        assert!(bump.samples.iter().all(|s| s.z == 0.0));
        assert_eq!(bump.q6_bump, vec![false, true, false, true]);
    }

    #[test]
    fn scaling() {
        let t = traj(&[(3.0, 4.0, true)]);
        assert_eq!(apply_scale(&t, Scale::Unit), t);
        let big = apply_scale(&t, Scale::Ten);
        assert_eq!((big.samples[0].x, big.samples[0].y), (30.0, 40.0));
        let back = apply_scale(&apply_scale(&t, Scale::Tenth), Scale::Ten);
        assert!((back.samples[0].x - 3.0).abs() < 1e-12);
        assert!((back.samples[0].y - 4.0).abs() < 1e-12);
    }

    #[test]
    fn anchoring() {
        let g = ArmGeometry::calibrated();
        let t = traj(&[(0.0, 0.0, true), (10.0, 5.0, true)]);
        let a = anchor_to_workspace(&t, &g);
        let first = a.samples[0].position();
        for (got, want) in first.iter().zip(INITIAL_PEN_POSITION) {
            assert!((got - want).abs() < 0.05);
        }
        assert_eq!(anchor_to_workspace(&a, &g), a);

        let shifted = traj(&[(100.0, -40.0, true), (110.0, -35.0, true)]);
        let b = anchor_to_workspace(&shifted, &g);
        for (p, q) in a.samples.iter().zip(&b.samples) {
            assert!((p.x - q.x).abs() < 1e-9 && (p.y - q.y).abs() < 1e-9);
        }
    }
}
