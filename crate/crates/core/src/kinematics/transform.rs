//! Rigid homogeneous transforms stored as a rotation block plus translation.
//!
//! The implicit bottom row is always `[0, 0, 0, 1]`, so only the upper 3x4
//! part is kept. Columns of the rotation block are the `n`, `o`, `a`
//! direction vectors of the frame.

use std::ops::Mul;

use nalgebra::{Matrix3, Matrix4, Vector3};
use serde::{Deserialize, Serialize};

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transform4 {
    pub r: Mat3,
    pub p: Vec3,
}

impl Default for Transform4 {
    fn default() -> Self {
        Self::identity()
    }
}

impl Transform4 {
    pub fn new(r: Mat3, p: Vec3) -> Self {
        Self { r, p }
    }

    pub fn identity() -> Self {
        Self {
            r: Mat3::identity(),
            p: Vec3::zeros(),
        }
    }

    pub fn translation(x: f64, y: f64, z: f64) -> Self {
        Self {
            r: Mat3::identity(),
            p: Vec3::new(x, y, z),
        }
    }

    pub fn rotation(r: Mat3) -> Self {
        Self {
            r,
            p: Vec3::zeros(),
        }
    }

    /// `self * other`: maps points expressed in `other`'s child frame into
    /// `self`'s parent frame.
    pub fn compose(&self, other: &Transform4) -> Transform4 {
        Transform4 {
            r: self.r * other.r,
            p: self.r * other.p + self.p,
        }
    }

    /// Closed-form rigid inverse `[Rᵀ, -Rᵀp]`.
    pub fn invert(&self) -> Transform4 {
        let rt = self.r.transpose();
        Transform4 {
            r: rt,
            p: -(rt * self.p),
        }
    }

    pub fn transform_point(&self, v: &Vec3) -> Vec3 {
        self.r * v + self.p
    }

    /// x axis direction (`n`).
    pub fn n(&self) -> Vec3 {
        self.r.column(0).into_owned()
    }

    /// y axis direction (`o`).
    pub fn o(&self) -> Vec3 {
        self.r.column(1).into_owned()
    }

    /// z axis direction (`a`, the approach vector).
    pub fn a(&self) -> Vec3 {
        self.r.column(2).into_owned()
    }

    pub fn to_matrix4(&self) -> Matrix4<f64> {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.r);
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.p);
        m
    }

    /// Largest absolute entry of `RᵀR − I`.
    pub fn orthonormality_error(&self) -> f64 {
        (self.r.transpose() * self.r - Mat3::identity()).amax()
    }
}

/// Free-function form of [`Transform4::compose`].
pub fn compose(a: &Transform4, b: &Transform4) -> Transform4 {
    a.compose(b)
}

pub fn invert(t: &Transform4) -> Transform4 {
    t.invert()
}

impl Mul for Transform4 {
    type Output = Transform4;

    fn mul(self, rhs: Transform4) -> Transform4 {
        self.compose(&rhs)
    }
}

impl<'a> Mul<&'a Transform4> for &'a Transform4 {
    type Output = Transform4;

    fn mul(self, rhs: &'a Transform4) -> Transform4 {
        self.compose(rhs)
    }
}

pub fn rot_x(angle: f64) -> Mat3 {
    let (s, c) = angle.sin_cos();
    Mat3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c)
}

pub fn rot_y(angle: f64) -> Mat3 {
    let (s, c) = angle.sin_cos();
    Mat3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

pub fn rot_z(angle: f64) -> Mat3 {
    let (s, c) = angle.sin_cos();
    Mat3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}
