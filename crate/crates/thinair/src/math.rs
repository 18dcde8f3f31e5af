//! Shared geometric primitives and special functions.

use std::f64::consts::TAU;

use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

/// 3-vector in meters (scene or device coordinates, context-dependent).
pub type Vec3 = Vector3<f64>;

/// 3x3 matrix alias used for rotations.
pub type Mat3 = Matrix3<f64>;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("rotation is not orthonormal within {tol:e} (max deviation {deviation:e})")]
    NotOrthonormal { deviation: f64, tol: f64 },
    #[error("rotation determinant is {0}, expected +1")]
    NotProperRotation(f64),
}

/// Rigid transform `p -> R p + t` with a proper rotation.
#[derive(Debug, Clone, PartialEq)]
pub struct RigidTransform {
    rotation: Mat3,
    translation: Vec3,
}

impl RigidTransform {
    /// Orthonormality tolerance for accepted rotations.
    pub const ROTATION_TOL: f64 = 1e-9;

    pub fn new(rotation: Mat3, translation: Vec3) -> Result<Self, GeometryError> {
        let gram = rotation.transpose() * rotation;
        let deviation = (gram - Mat3::identity()).abs().max();
        if deviation > Self::ROTATION_TOL {
            return Err(GeometryError::NotOrthonormal {
                deviation,
                tol: Self::ROTATION_TOL,
            });
        }
        let det = rotation.determinant();
        if (det - 1.0).abs() > Self::ROTATION_TOL {
            return Err(GeometryError::NotProperRotation(det));
        }
        Ok(Self {
            rotation,
            translation,
        })
    }

    pub fn identity() -> Self {
        Self {
            rotation: Mat3::identity(),
            translation: Vec3::zeros(),
        }
    }

    pub fn translation(t: Vec3) -> Self {
        Self {
            rotation: Mat3::identity(),
            translation: t,
        }
    }

    /// Rotation about `axis` (unit) by `angle`, Rodrigues form.
    pub fn from_axis_angle(
        axis: Vec3,
        angle: f64,
        translation: Vec3,
    ) -> Result<Self, GeometryError> {
        Self::new(rodrigues(axis, angle.cos(), angle.sin()), translation)
    }

    pub fn rotation(&self) -> &Mat3 {
        &self.rotation
    }

    pub fn translation_vec(&self) -> Vec3 {
        self.translation
    }

    /// Maps a point: `R p + t`.
    pub fn apply(&self, p: Vec3) -> Vec3 {
        self.rotation * p + self.translation
    }

    /// Inverse point map: `R^T (p - t)`.
    pub fn apply_inverse(&self, p: Vec3) -> Vec3 {
        self.rotation.transpose() * (p - self.translation)
    }

    /// Maps a direction (no translation).
    pub fn rotate(&self, v: Vec3) -> Vec3 {
        self.rotation * v
    }

    /// `self` after `inner`: `(self ∘ inner)(p) = self(inner(p))`.
    pub fn compose(&self, inner: &Self) -> Self {
        Self {
            rotation: self.rotation * inner.rotation,
            translation: self.rotation * inner.translation + self.translation,
        }
    }
}

/// Rodrigues rotation matrix from a unit axis and precomputed cos/sin.
pub fn rodrigues(axis: Vec3, cos_t: f64, sin_t: f64) -> Mat3 {
    let (ax, ay, az) = (axis.x, axis.y, axis.z);
    let c = cos_t;
    let s = sin_t;
    let k = 1.0 - c;
    Mat3::new(
        c + k * ax * ax,
        k * ax * ay - s * az,
        k * ax * az + s * ay,
        k * ay * ax + s * az,
        c + k * ay * ay,
        k * ay * az - s * ax,
        k * az * ax - s * ay,
        k * az * ay + s * ax,
        c + k * az * az,
    )
}

/// Axis-aligned box, inclusive on all faces.
#[derive(Debug, Clone, PartialEq)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub fn new(min: Vec3, max: Vec3) -> Self {
        Self { min, max }
    }

    pub fn contains(&self, p: Vec3) -> bool {
        p.x >= self.min.x
            && p.x <= self.max.x
            && p.y >= self.min.y
            && p.y <= self.max.y
            && p.z >= self.min.z
            && p.z <= self.max.z
    }

    pub fn extent(&self) -> Vec3 {
        self.max - self.min
    }

    pub fn has_positive_extent(&self) -> bool {
        let e = self.extent();
        e.x > 0.0 && e.y > 0.0 && e.z > 0.0
    }
}

/// Wraps a phase to `[0, 2π)`.
pub fn wrap_phase(x: f64) -> f64 {
    let mut r = x % TAU;
    if r < 0.0 {
        r += TAU;
    }
    // A negative input within one ulp of zero can land exactly on 2π.
    if r >= TAU {
        r = 0.0;
    }
    r
}

/// First-order Bessel function of the first kind, ascending power series
/// with 1e-12 term truncation. Accurate for |x| <= 12, which covers every
/// piston argument reachable with the bundled array geometries.
pub fn bessel_j1(x: f64) -> f64 {
    let half = x / 2.0;
    let mut term = half;
    let mut sum = term;
    let mut m = 1.0_f64;
    while term.abs() > 1e-12 && m < 300.0 {
        term = term * (-(half * half)) / (m * (m + 1.0));
        sum += term;
        m += 1.0;
    }
    sum
}

/// `2 J1(x)/x` with its removable singularity at the origin.
pub fn piston_directivity_factor(x: f64) -> f64 {
    if x < 1e-8 {
        1.0 - x * x / 8.0
    } else {
        2.0 * bessel_j1(x) / x
    }
}

pub fn is_unit(v: Vec3, tol: f64) -> bool {
    (v.norm() - 1.0).abs() <= tol
}
