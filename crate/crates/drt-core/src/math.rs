//! Minimal 3D vector / rotation matrix algebra used throughout the engine.
//!
//! All quantities are SI: meters, m/s, m/s², radians.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

/// Tolerance for orthonormality checks on rotation matrices.
pub const ROT_ORTHO_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.0 };
    pub const X: Vec3 = Vec3 { x: 1.0, y: 0.0, z: 0.0 };
    pub const Y: Vec3 = Vec3 { x: 0.0, y: 1.0, z: 0.0 };
    pub const Z: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 1.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, rhs: Vec3) -> f64 {
        self.x * rhs.x + self.y * rhs.y + self.z * rhs.z
    }

    pub fn cross(self, rhs: Vec3) -> Vec3 {
        Vec3 {
            x: self.y * rhs.z - self.z * rhs.y,
            y: self.z * rhs.x - self.x * rhs.z,
            z: self.x * rhs.y - self.y * rhs.x,
        }
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn normalized(self) -> Vec3 {
        let n = self.norm();
        debug_assert!(n > 0.0, "cannot normalize zero vector");
        self / n
    }

    /// Unit vector, or `None` when the norm is below `eps`.
    pub fn try_normalized(self, eps: f64) -> Option<Vec3> {
        let n = self.norm();
        if n > eps {
            Some(self / n)
        } else {
            None
        }
    }

    pub fn distance(self, rhs: Vec3) -> f64 {
        (self - rhs).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Any unit vector perpendicular to `self` (which must be non-zero).
    pub fn any_perpendicular(self) -> Vec3 {
        let r = if self.x.abs() < 0.9 * self.norm() { Vec3::X } else { Vec3::Y };
        (r - self * (r.dot(self) / self.norm_sq())).normalized()
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, rhs: Vec3) {
        *self = *self + rhs;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        v * self
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    fn div(self, s: f64) -> Vec3 {
        Vec3::new(self.x / s, self.y / s, self.z / s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// Proper rotation matrix (orthonormal, det = +1), stored row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationMatrix {
    pub rows: [Vec3; 3],
}

impl RotationMatrix {
    pub const IDENTITY: RotationMatrix = RotationMatrix {
        rows: [Vec3::X, Vec3::Y, Vec3::Z],
    };

    /// Builds the matrix whose *columns* are the given basis vectors.
    ///
    /// Applying the result maps local components onto the global frame when
    /// `(ex, ey, ez)` are the local axes expressed in global coordinates.
    pub fn from_columns(ex: Vec3, ey: Vec3, ez: Vec3) -> Self {
        RotationMatrix {
            rows: [
                Vec3::new(ex.x, ey.x, ez.x),
                Vec3::new(ex.y, ey.y, ez.y),
                Vec3::new(ex.z, ey.z, ez.z),
            ],
        }
    }

    /// Rodrigues rotation about unit axis `k` by angle `theta` (right-hand rule).
    pub fn from_axis_angle(k: Vec3, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        let rot = |v: Vec3| v * c + k.cross(v) * s + k * (k.dot(v) * (1.0 - c));
        RotationMatrix::from_columns(rot(Vec3::X), rot(Vec3::Y), rot(Vec3::Z))
    }

    pub fn apply(&self, v: Vec3) -> Vec3 {
        Vec3::new(self.rows[0].dot(v), self.rows[1].dot(v), self.rows[2].dot(v))
    }

    /// Applies the transpose (= inverse for a rotation).
    pub fn apply_transpose(&self, v: Vec3) -> Vec3 {
        self.rows[0] * v.x + self.rows[1] * v.y + self.rows[2] * v.z
    }

    pub fn transpose(&self) -> RotationMatrix {
        RotationMatrix::from_columns(self.rows[0], self.rows[1], self.rows[2])
    }

    /// Matrix product `self * rhs`.
    pub fn compose(&self, rhs: &RotationMatrix) -> RotationMatrix {
        let c0 = self.apply(rhs.column(0));
        let c1 = self.apply(rhs.column(1));
        let c2 = self.apply(rhs.column(2));
        RotationMatrix::from_columns(c0, c1, c2)
    }

    pub fn column(&self, i: usize) -> Vec3 {
        Vec3::new(self.rows[0][i], self.rows[1][i], self.rows[2][i])
    }

    pub fn det(&self) -> f64 {
        self.rows[0].dot(self.rows[1].cross(self.rows[2]))
    }

    /// Maximum absolute deviation of RᵀR from the identity.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let d = self.column(i).dot(self.column(j)) - if i == j { 1.0 } else { 0.0 };
                worst = worst.max(d.abs());
            }
        }
        worst
    }
}

impl std::ops::Index<usize> for Vec3 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        match i {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("Vec3 index out of range"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cross_product_handedness() {
        assert_eq!(Vec3::X.cross(Vec3::Y), Vec3::Z);
        assert_eq!(Vec3::Y.cross(Vec3::Z), Vec3::X);
    }

    #[test]
    fn rodrigues_quarter_turn_about_z() {
        let r = RotationMatrix::from_axis_angle(Vec3::Z, std::f64::consts::FRAC_PI_2);
        let v = r.apply(Vec3::X);
        assert!((v - Vec3::Y).norm() < 1e-15);
    }

    #[test]
    fn rotation_stays_orthonormal_under_composition() {
        let a = RotationMatrix::from_axis_angle(Vec3::new(0.6, 0.8, 0.0), 1.234);
        let b = RotationMatrix::from_axis_angle(Vec3::new(0.0, 0.6, 0.8), -2.345);
        let mut m = RotationMatrix::IDENTITY;
        for _ in 0..100 {
            m = m.compose(&a).compose(&b);
        }
        assert!(m.orthonormality_error() < ROT_ORTHO_TOL);
        assert!((m.det() - 1.0).abs() < ROT_ORTHO_TOL);
    }

    #[test]
    fn transpose_is_inverse() {
        let r = RotationMatrix::from_axis_angle(Vec3::new(1.0, 2.0, 3.0).normalized(), 0.7);
        let v = Vec3::new(0.3, -1.2, 2.5);
        assert!((r.apply_transpose(r.apply(v)) - v).norm() < 1e-14);
    }
}
