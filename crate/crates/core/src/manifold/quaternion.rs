//! Unit quaternions (scalar-first, Hamilton convention) and rotation matrices.
//!
//! The map `q -> R(q)` is the two-to-one covering S^3 -> SO(3): `q` and `-q`
//! give the same rotation. Rotations act actively on column vectors.

use nalgebra::{DVector, Matrix3, Vector3};

use super::sphere::{UnitVector, UNIT_TOL};
use crate::error::{Error, Result};

/// Tolerance on `|R^T R - I|_F` and `|det R - 1|`.
pub const ROTATION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quaternion {
    scalar: f64,
    vector: Vector3<f64>,
}

impl Quaternion {
    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Result<Self> {
        let q = Self {
            scalar: w,
            vector: Vector3::new(x, y, z),
        };
        let norm = q.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::NotUnit { norm });
        }
        Ok(q)
    }

    pub fn normalize(w: f64, x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (w * w + x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::Degenerate { norm });
        }
        Ok(Self {
            scalar: w / norm,
            vector: Vector3::new(x, y, z) / norm,
        })
    }

    pub fn identity() -> Self {
        Self {
            scalar: 1.0,
            vector: Vector3::zeros(),
        }
    }

    /// Rotation by `angle` radians about `axis` (normalized internally).
    pub fn from_axis_angle(axis: &Vector3<f64>, angle: f64) -> Result<Self> {
        let norm = axis.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::Degenerate { norm });
        }
        let half = 0.5 * angle;
        let v = axis * (half.sin() / norm);
        Self::normalize(half.cos(), v.x, v.y, v.z)
    }

    /// Shortest-arc rotation carrying unit vector `from` onto unit vector `to`.
    /// For antipodal inputs a half turn about an arbitrary perpendicular axis is used.
    pub fn from_two_vectors(from: &Vector3<f64>, to: &Vector3<f64>) -> Result<Self> {
        let (a, b) = (from.normalize(), to.normalize());
        let c = a.dot(&b);
        if c < -1.0 + 1e-12 {
            let helper = if a.x.abs() < 0.9 {
                Vector3::x()
            } else {
                Vector3::y()
            };
            return Self::from_axis_angle(&a.cross(&helper), std::f64::consts::PI);
        }
        let axis = a.cross(&b);
        Self::normalize(1.0 + c, axis.x, axis.y, axis.z)
    }

    pub fn scalar(&self) -> f64 {
        self.scalar
    }

    pub fn vector(&self) -> &Vector3<f64> {
        &self.vector
    }

    /// Components as `[w, x, y, z]`.
    pub fn to_array(&self) -> [f64; 4] {
        [self.scalar, self.vector.x, self.vector.y, self.vector.z]
    }

    pub fn norm(&self) -> f64 {
        (self.scalar * self.scalar + self.vector.norm_squared()).sqrt()
    }

    pub fn conjugate(&self) -> Self {
        Self {
            scalar: self.scalar,
            vector: -self.vector,
        }
    }

    /// For unit quaternions the inverse is the conjugate.
    pub fn inverse(&self) -> Self {
        self.conjugate()
    }

    pub fn neg(&self) -> Self {
        Self {
            scalar: -self.scalar,
            vector: -self.vector,
        }
    }

    pub fn dot(&self, other: &Quaternion) -> f64 {
        self.scalar * other.scalar + self.vector.dot(&other.vector)
    }

    /// The point of S^3 with coordinates `(w, x, y, z)`.
    pub fn to_unit_vector(&self) -> UnitVector {
        UnitVector::from_raw(DVector::from_column_slice(&self.to_array()))
    }

    pub fn from_unit_vector(x: &UnitVector) -> Result<Self> {
        if x.dim() != 3 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: x.dim() + 1,
            });
        }
        let c = x.as_slice();
        Self::new(c[0], c[1], c[2], c[3])
    }

    /// Representative with nonnegative scalar part; at zero scalar part the
    /// first nonzero vector component is made positive.
    pub fn canonical(&self) -> Self {
        let flip = if self.scalar != 0.0 {
            self.scalar < 0.0
        } else {
            self.vector
                .iter()
                .find(|c| **c != 0.0)
                .is_some_and(|c| *c < 0.0)
        };
        if flip {
            self.neg()
        } else {
            *self
        }
    }

    fn renormalized(self) -> Self {
        let norm = self.norm();
        if (norm - 1.0).abs() > UNIT_TOL {
            Self {
                scalar: self.scalar / norm,
                vector: self.vector / norm,
            }
        } else {
            self
        }
    }
}

/// Hamilton product `p q`.
pub fn quat_mul(p: &Quaternion, q: &Quaternion) -> Quaternion {
    Quaternion {
        scalar: p.scalar * q.scalar - p.vector.dot(&q.vector),
        vector: q.vector * p.scalar + p.vector * q.scalar + p.vector.cross(&q.vector),
    }
    .renormalized()
}

/// An element of SO(3).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationMatrix {
    entries: Matrix3<f64>,
}

impl RotationMatrix {
    pub fn new(entries: Matrix3<f64>) -> Result<Self> {
        let orthogonality = (entries.transpose() * entries - Matrix3::identity()).norm();
        let det = entries.determinant();
        if !(orthogonality <= ROTATION_TOL && (det - 1.0).abs() <= ROTATION_TOL) {
            return Err(Error::NotRotation { orthogonality, det });
        }
        Ok(Self { entries })
    }

    pub fn identity() -> Self {
        Self {
            entries: Matrix3::identity(),
        }
    }

    pub fn from_axis_angle(axis: &Vector3<f64>, angle: f64) -> Result<Self> {
        Ok(quat_to_rotmat(&Quaternion::from_axis_angle(axis, angle)?))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.entries
    }

    pub fn transpose(&self) -> Self {
        Self {
            entries: self.entries.transpose(),
        }
    }

    pub fn compose(&self, other: &RotationMatrix) -> Self {
        Self {
            entries: self.entries * other.entries,
        }
    }

    pub fn apply(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.entries * v
    }

    /// Frobenius distance `|R_a - R_b|_F`.
    pub fn frobenius_distance(&self, other: &RotationMatrix) -> f64 {
        (self.entries - other.entries).norm()
    }
}

/// The covering map S^3 -> SO(3).
pub fn quat_to_rotmat(q: &Quaternion) -> RotationMatrix {
    let (w, x, y, z) = (q.scalar, q.vector.x, q.vector.y, q.vector.z);
    let entries = Matrix3::new(
        1.0 - 2.0 * (y * y + z * z),
        2.0 * (x * y - w * z),
        2.0 * (x * z + w * y),
        2.0 * (x * y + w * z),
        1.0 - 2.0 * (x * x + z * z),
        2.0 * (y * z - w * x),
        2.0 * (x * z - w * y),
        2.0 * (y * z + w * x),
        1.0 - 2.0 * (x * x + y * y),
    );
    RotationMatrix { entries }
}

/// Inverse of [`quat_to_rotmat`] up to sign, returned in canonical form.
pub fn rotmat_to_quat(r: &RotationMatrix) -> Result<Quaternion> {
    // Re-validate: RotationMatrix values can only be built through checked paths,
    // but products of many of them may drift.
    let r = RotationMatrix::new(r.entries)?;
    let m = &r.entries;
    let trace = m[(0, 0)] + m[(1, 1)] + m[(2, 2)];
    // Shepperd's method: pivot on the largest of w, x, y, z.
    let q = if trace >= m[(0, 0)].max(m[(1, 1)]).max(m[(2, 2)]) {
        let s = 2.0 * (1.0 + trace).sqrt();
        Quaternion::normalize(
            0.25 * s,
            (m[(2, 1)] - m[(1, 2)]) / s,
            (m[(0, 2)] - m[(2, 0)]) / s,
            (m[(1, 0)] - m[(0, 1)]) / s,
        )?
    } else if m[(0, 0)] >= m[(1, 1)] && m[(0, 0)] >= m[(2, 2)] {
        let s = 2.0 * (1.0 + m[(0, 0)] - m[(1, 1)] - m[(2, 2)]).sqrt();
        Quaternion::normalize(
            (m[(2, 1)] - m[(1, 2)]) / s,
            0.25 * s,
            (m[(0, 1)] + m[(1, 0)]) / s,
            (m[(0, 2)] + m[(2, 0)]) / s,
        )?
    } else if m[(1, 1)] >= m[(2, 2)] {
        let s = 2.0 * (1.0 + m[(1, 1)] - m[(0, 0)] - m[(2, 2)]).sqrt();
        Quaternion::normalize(
            (m[(0, 2)] - m[(2, 0)]) / s,
            (m[(0, 1)] + m[(1, 0)]) / s,
            0.25 * s,
            (m[(1, 2)] + m[(2, 1)]) / s,
        )?
    } else {
        let s = 2.0 * (1.0 + m[(2, 2)] - m[(0, 0)] - m[(1, 1)]).sqrt();
        Quaternion::normalize(
            (m[(1, 0)] - m[(0, 1)]) / s,
            (m[(0, 2)] + m[(2, 0)]) / s,
            (m[(1, 2)] + m[(2, 1)]) / s,
            0.25 * s,
        )?
    };
    Ok(q.canonical())
}

/// Pointing direction `R b` of the body axis `b` expressed in the world frame.
pub fn reduced_attitude(r: &RotationMatrix, b: &UnitVector) -> Result<UnitVector> {
    if b.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: b.dim() + 1,
        });
    }
    let body = Vector3::from_column_slice(b.as_slice());
    let world = r.apply(&body);
    Ok(UnitVector::from_drifting(DVector::from_column_slice(
        world.as_slice(),
    )))
}
