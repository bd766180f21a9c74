//! Seeded random constructions used by presets, scenario generators and tests.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::manifold::{exp_unchecked, tangent_project, quat_to_rotmat, Quaternion, RotationMatrix, UnitVector};
use crate::network::Graph;

/// Uniform point on S^dim.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> UnitVector {
    loop {
        let v = DVector::from_fn(dim + 1, |_, _| rng.sample::<f64, _>(StandardNormal));
        if v.norm() > 1e-6 {
            return UnitVector::normalize(v).expect("nonzero gaussian sample");
        }
    }
}

/// Unit tangent direction at `x`, uniform on the tangent sphere.
pub fn random_tangent_direction<R: Rng + ?Sized>(rng: &mut R, x: &UnitVector) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(x.dim() + 1, |_, _| rng.sample::<f64, _>(StandardNormal));
        let t = tangent_project(x, &v).expect("matching dimension").components().clone();
        let norm = t.norm();
        if norm > 1e-6 {
            return t / norm;
        }
    }
}

/// Point at geodesic distance at most `radius` from `center`: uniform
/// direction, distance uniform in `[0, radius]`.
pub fn sample_in_cap<R: Rng + ?Sized>(rng: &mut R, center: &UnitVector, radius: f64) -> UnitVector {
    let dir = random_tangent_direction(rng, center);
    let dist = radius * rng.random::<f64>();
    exp_unchecked(center.coords(), &(dir * dist))
}

pub fn random_quaternion<R: Rng + ?Sized>(rng: &mut R) -> Quaternion {
    let v = random_unit_vector(rng, 3);
    let c = v.as_slice();
    Quaternion::normalize(c[0], c[1], c[2], c[3]).expect("unit sample")
}

/// Haar-uniform rotation.
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> RotationMatrix {
    quat_to_rotmat(&random_quaternion(rng))
}

/// Random spanning tree (each agent attaches to a uniformly chosen earlier
/// agent of a random ordering) united with independent `G(n, p)` edges.
/// Unit weights; always connected.
pub fn random_connected_graph<R: Rng + ?Sized>(rng: &mut R, n: usize, p: f64) -> Graph {
    let mut order: Vec<usize> = (0..n).collect();
    for k in (1..n).rev() {
        order.swap(k, rng.random_range(0..=k));
    }
    let mut present = vec![vec![false; n]; n];
    for k in 1..n {
        let (a, b) = (order[k], order[rng.random_range(0..k)]);
        present[a.min(b)][a.max(b)] = true;
    }
    for (i, row) in present.iter_mut().enumerate() {
        for cell in row.iter_mut().skip(i + 1) {
            if rng.random_bool(p) {
                *cell = true;
            }
        }
    }
    let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
    let edges: Vec<_> = edges.filter(|&(i, j)| present[i][j]).map(|(i, j)| (i, j, 1.0)).collect();
    Graph::new(n, edges).expect("valid random graph")
}
