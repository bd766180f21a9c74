//! Geometry of the unit sphere S^n, unit quaternions and SO(3).

mod quaternion;
mod sphere;

pub use quaternion::{
    quat_mul, quat_to_rotmat, reduced_attitude, rotmat_to_quat, Quaternion, RotationMatrix,
    ROTATION_TOL,
};
pub use sphere::{
    geodesic_distance, sphere_exp, tangent_project, TangentVector, UnitVector, TANGENT_TOL,
    UNIT_TOL,
};

pub(crate) use sphere::{angle_between, dot_slices, exp_unchecked};
