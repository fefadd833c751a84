//! Pen pose on the writing surface and writing-plane rotation.

use serde::{Deserialize, Serialize};

use super::geometry::ArmGeometry;
use super::transform::{rot_x, rot_y, rot_z, Mat3, Transform4, Vec3};
use crate::trajectory::PenSample;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenPose {
    pub position: [f64; 3],
    /// Azimuth θ, rad.
    pub azimuth: f64,
    /// Inclination φ, rad.
    pub inclination: f64,
}

impl PenPose {
    pub fn from_sample(s: &PenSample) -> Self {
        Self {
            position: s.position(),
            azimuth: s.theta,
            inclination: s.phi,
        }
    }

    /// Orientation of the pen-tip frame relative to the surface frame:
    /// a turn of `π/2 − θ` about the surface normal followed by a turn of
    /// `−π/2 − φ` about the new y axis.
    pub fn rotation(&self) -> Mat3 {
        pen_rotation(self.azimuth, self.inclination)
    }
}

pub fn pen_rotation(theta: f64, phi: f64) -> Mat3 {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Mat3::new(
        -st * sp,
        -ct,
        -st * cp,
        -ct * sp,
        st,
        -ct * cp,
        cp,
        0.0,
        -sp,
    )
}

/// Pen-tip z axis implied by `(θ, φ)`; the third column of [`pen_rotation`].
pub fn pen_direction(theta: f64, phi: f64) -> Vec3 {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Vec3::new(-st * cp, -ct * cp, -sp)
}

/// Pen-tip pose in the arm base frame: surface offset plus pen position,
/// with the pen orientation rotation block.
pub fn pen_pose_matrix(s: &PenSample, g: &ArmGeometry) -> Transform4 {
    Transform4::new(
        pen_rotation(s.theta, s.phi),
        g.surface_offset() + Vec3::new(s.x, s.y, s.z),
    )
}

/// `Rz(ρz)·Ry(ρy)·Rx(ρx)`.
pub fn plane_rotation(gamma: [f64; 3]) -> Mat3 {
    rot_z(gamma[2]) * rot_y(gamma[1]) * rot_x(gamma[0])
}

/// Rotates the pen position and pen direction with the writing plane, then
/// re-derives `(θ, φ)` from the rotated direction.
///
/// A direction fixes `(θ, φ)` only up to `(θ + π, π − φ)`; the pair whose
/// `cos φ` has the same sign as the input's is returned.
pub fn rotate_writing_plane(s: &PenSample, gamma: [f64; 3]) -> PenSample {
    if gamma == [0.0; 3] {
        return *s;
    }
    let r = plane_rotation(gamma);
    let p = r * Vec3::new(s.x, s.y, s.z);
    let dir = r * pen_direction(s.theta, s.phi);

    let sin_phi = (-dir.z).clamp(-1.0, 1.0);
    let horizontal = dir.x.hypot(dir.y);
    let cos_phi = if s.phi.cos() < 0.0 {
        -horizontal
    } else {
        horizontal
    };
    let phi = sin_phi.atan2(cos_phi);
    let theta = if horizontal < 1e-12 {
        s.theta
    } else {
        (-dir.x / cos_phi).atan2(-dir.y / cos_phi)
    };

    PenSample {
        x: p.x,
        y: p.y,
        z: p.z,
        theta,
        phi,
        ..*s
    }
}
