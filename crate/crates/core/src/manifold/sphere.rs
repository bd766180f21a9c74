use nalgebra::DVector;

use crate::error::{Error, Result};

/// Construction tolerance on `| |x| - 1 |`.
pub const UNIT_TOL: f64 = 1e-12;
/// Tolerance on `|<x, v>|` for a tangent vector at `x`.
pub const TANGENT_TOL: f64 = 1e-10;

/// A point on the unit sphere S^n, stored by its n+1 ambient coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitVector {
    coords: DVector<f64>,
}

impl UnitVector {
    /// Wraps `coords`, which must already have unit norm to [`UNIT_TOL`].
    pub fn new(coords: DVector<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::InvalidDimension(coords.len()));
        }
        let norm = coords.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::NotUnit { norm });
        }
        Ok(Self { coords })
    }

    pub fn from_slice(coords: &[f64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(coords))
    }

    /// Projects an arbitrary nonzero ambient vector radially onto the sphere.
    pub fn normalize(coords: DVector<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::InvalidDimension(coords.len()));
        }
        let norm = coords.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::Degenerate { norm });
        }
        Ok(Self {
            coords: coords / norm,
        })
    }

    pub fn normalize_slice(coords: &[f64]) -> Result<Self> {
        Self::normalize(DVector::from_column_slice(coords))
    }

    /// The `k`-th standard basis vector of R^{dim+1}.
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(dim >= 1 && k <= dim, "basis index out of range");
        let mut coords = DVector::zeros(dim + 1);
        coords[k] = 1.0;
        Self { coords }
    }

    /// Skips the norm check. Callers keep the norm within [`UNIT_TOL`].
    pub(crate) fn from_raw(coords: DVector<f64>) -> Self {
        Self { coords }
    }

    /// Renormalizes only when drift exceeds [`UNIT_TOL`].
    pub(crate) fn from_drifting(mut coords: DVector<f64>) -> Self {
        let norm = coords.norm();
        if (norm - 1.0).abs() > UNIT_TOL {
            coords /= norm;
        }
        Self { coords }
    }

    /// Sphere dimension n (ambient length minus one).
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn as_slice(&self) -> &[f64] {
        self.coords.as_slice()
    }

    pub fn into_coords(self) -> DVector<f64> {
        self.coords
    }

    pub fn dot(&self, other: &UnitVector) -> f64 {
        self.coords.dot(&other.coords)
    }

    pub fn neg(&self) -> Self {
        Self {
            coords: -&self.coords,
        }
    }

    fn check_same_dim(&self, len: usize) -> Result<()> {
        if self.coords.len() != len {
            return Err(Error::DimensionMismatch {
                expected: self.coords.len(),
                found: len,
            });
        }
        Ok(())
    }
}

/// A vector in the tangent space of the sphere at `at`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    at: UnitVector,
    components: DVector<f64>,
}

impl TangentVector {
    pub fn new(at: UnitVector, components: DVector<f64>) -> Result<Self> {
        at.check_same_dim(components.len())?;
        let residual = at.coords.dot(&components).abs();
        if residual > TANGENT_TOL || !residual.is_finite() {
            return Err(Error::NotTangent { residual });
        }
        Ok(Self { at, components })
    }

    pub fn zero(at: UnitVector) -> Self {
        let components = DVector::zeros(at.coords.len());
        Self { at, components }
    }

    pub(crate) fn from_raw(at: UnitVector, components: DVector<f64>) -> Self {
        Self { at, components }
    }

    pub fn at(&self) -> &UnitVector {
        &self.at
    }

    pub fn components(&self) -> &DVector<f64> {
        &self.components
    }

    pub fn norm(&self) -> f64 {
        self.components.norm()
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            at: self.at.clone(),
            components: &self.components * factor,
        }
    }
}

/// Orthogonal projection `(I - x x^T) v` onto the tangent space at `x`.
pub fn tangent_project(x: &UnitVector, v: &DVector<f64>) -> Result<TangentVector> {
    x.check_same_dim(v.len())?;
    let along = x.coords.dot(v);
    let mut components = v - &x.coords * along;
    // A second pass removes the O(eps |v|) normal residue left by the first.
    let residue = x.coords.dot(&components);
    components.axpy(-residue, &x.coords, 1.0);
    Ok(TangentVector::from_raw(x.clone(), components))
}

/// Great-circle distance in `[0, pi]`.
pub fn geodesic_distance(x: &UnitVector, y: &UnitVector) -> Result<f64> {
    x.check_same_dim(y.coords.len())?;
    Ok(angle_between(x.as_slice(), y.as_slice()))
}

/// Angle between two unit vectors given as slices of equal length.
///
/// Uses `2 atan2(|x - y|, |x + y|)`, which equals `arccos(<x, y>)` clamped to
/// `[-1, 1]` but keeps full relative precision near 0 and near pi.
pub(crate) fn angle_between(x: &[f64], y: &[f64]) -> f64 {
    let (mut diff, mut sum) = (0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        diff += (a - b) * (a - b);
        sum += (a + b) * (a + b);
    }
    2.0 * diff.sqrt().atan2(sum.sqrt())
}

pub(crate) fn dot_slices(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Exponential map of the round sphere: follows the great circle leaving `x`
/// with initial velocity `v` for unit time.
pub fn sphere_exp(x: &UnitVector, v: &TangentVector) -> Result<UnitVector> {
    x.check_same_dim(v.components.len())?;
    let residual = x.coords.dot(&v.components).abs();
    if residual > TANGENT_TOL || !residual.is_finite() {
        return Err(Error::NotTangent { residual });
    }
    Ok(exp_unchecked(&x.coords, &v.components))
}

pub(crate) fn exp_unchecked(x: &DVector<f64>, v: &DVector<f64>) -> UnitVector {
    let speed = v.norm();
    if speed == 0.0 {
        return UnitVector::from_raw(x.clone());
    }
    let sinc = if speed < 1e-8 {
        1.0 - speed * speed / 6.0
    } else {
        speed.sin() / speed
    };
    let mut out = x * speed.cos();
    out.axpy(sinc, v, 1.0);
    UnitVector::from_drifting(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn e(dim: usize, k: usize) -> UnitVector {
        UnitVector::basis(dim, k)
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(matches!(
            UnitVector::from_slice(&[1.0]),
            Err(Error::InvalidDimension(1))
        ));
        assert!(matches!(
            UnitVector::from_slice(&[1.0, 1.0]),
            Err(Error::NotUnit { .. })
        ));
        assert!(UnitVector::normalize_slice(&[0.0, 0.0]).is_err());
        assert_eq!(UnitVector::normalize_slice(&[3.0, 4.0]).unwrap().dim(), 1);
    }

    #[test]
    fn project_normal_and_tangent() {
        let x = e(2, 0);
        let p = tangent_project(&x, &e(2, 0).into_coords()).unwrap();
        assert_eq!(p.norm(), 0.0);
        let p = tangent_project(&x, &e(2, 1).into_coords()).unwrap();
        assert_eq!(p.components(), e(2, 1).coords());
    }

    #[test]
    fn project_matches_dense_matrix() {
        let x = UnitVector::normalize_slice(&[1.0, 1.0, 1.0]).unwrap();
        let v = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        let proj = DMatrix::<f64>::identity(3, 3) - x.coords() * x.coords().transpose();
        let expected = proj * &v;
        let got = tangent_project(&x, &v).unwrap();
        for k in 0..3 {
            assert_abs_diff_eq!(got.components()[k], expected[k], epsilon = 1e-15);
        }
        assert_abs_diff_eq!(expected[0], 2.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn project_dimension_mismatch() {
        let x = e(2, 0);
        let v = DVector::zeros(2);
        assert!(matches!(
            tangent_project(&x, &v),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn distance_special_cases() {
        let x = e(2, 0);
        assert_eq!(geodesic_distance(&x, &x).unwrap(), 0.0);
        assert_abs_diff_eq!(geodesic_distance(&x, &x.neg()).unwrap(), PI, epsilon = 1e-15);
        assert_abs_diff_eq!(
            geodesic_distance(&x, &e(2, 1)).unwrap(),
            FRAC_PI_2,
            epsilon = 1e-15
        );
        assert!(geodesic_distance(&x, &e(3, 0)).is_err());
    }

    #[test]
    fn distance_agrees_with_clamped_arccos() {
        let x = UnitVector::normalize_slice(&[0.3, -0.2, 0.9]).unwrap();
        let y = UnitVector::normalize_slice(&[-0.5, 0.4, 0.1]).unwrap();
        let acos = x.dot(&y).clamp(-1.0, 1.0).acos();
        assert_abs_diff_eq!(geodesic_distance(&x, &y).unwrap(), acos, epsilon = 1e-14);
    }

    #[test]
    fn exp_identity_and_quarter_turn() {
        let x = e(2, 0);
        let zero = TangentVector::zero(x.clone());
        assert_eq!(sphere_exp(&x, &zero).unwrap(), x);
        let v = TangentVector::new(x.clone(), e(2, 1).into_coords() * FRAC_PI_2).unwrap();
        let out = sphere_exp(&x, &v).unwrap();
        assert_abs_diff_eq!(out.coords()[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(out.coords()[1], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn exp_rejects_non_tangent() {
        let x = e(2, 0);
        let bad = TangentVector::from_raw(x.clone(), e(2, 0).into_coords());
        assert!(matches!(sphere_exp(&x, &bad), Err(Error::NotTangent { .. })));
        assert!(TangentVector::new(x, DVector::from_vec(vec![1e-6, 1.0, 0.0])).is_err());
    }
}
