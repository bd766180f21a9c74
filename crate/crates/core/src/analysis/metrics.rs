use nalgebra::DVector;

use crate::dynamics::AgentStates;
use crate::error::{Error, Result};
use crate::manifold::{angle_between, UnitVector};
use crate::network::Graph;
use crate::shaping::DistanceFunction;

/// Edge-sum energy `V = sum_{(i,j) in E} a_ij f(theta_ij)`, each edge once.
pub fn lyapunov_value(s: &AgentStates, g: &Graph, d: &DistanceFunction) -> Result<f64> {
    if g.n_agents() != s.len() {
        return Err(Error::DimensionMismatch {
            expected: s.len(),
            found: g.n_agents(),
        });
    }
    Ok(edge_energy(&s.to_flat(), s.dim() + 1, g, d))
}

pub(crate) fn edge_energy(flat: &[f64], m: usize, g: &Graph, d: &DistanceFunction) -> f64 {
    g.edges()
        .iter()
        .map(|e| {
            let theta = angle_between(&flat[e.i * m..(e.i + 1) * m], &flat[e.j * m..(e.j + 1) * m]);
            e.weight * d.eval_unchecked(theta)
        })
        .sum()
}

/// Largest pairwise geodesic distance; zero iff all agents coincide.
pub fn sync_error(s: &AgentStates) -> f64 {
    max_pairwise_angle(&s.to_flat(), s.dim() + 1)
}

pub(crate) fn max_pairwise_angle(flat: &[f64], m: usize) -> f64 {
    let n = flat.len() / m;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            worst = worst.max(angle_between(
                &flat[i * m..(i + 1) * m],
                &flat[j * m..(j + 1) * m],
            ));
        }
    }
    worst
}

#[derive(Debug, Clone, PartialEq)]
pub enum Containment {
    /// Every state has positive inner product with `pole`.
    Certified { pole: UnitVector },
    /// Inconclusive; the states may still lie in some open hemisphere.
    Uncertified,
}

impl Containment {
    pub fn is_certified(&self) -> bool {
        matches!(self, Containment::Certified { .. })
    }
}

/// One-sided open-hemisphere certificate using the normalized mean as pole.
pub fn hemisphere_certificate(s: &AgentStates) -> Result<Containment> {
    let mut mean = DVector::zeros(s.dim() + 1);
    for x in s.states() {
        mean += x.coords();
    }
    mean /= s.len() as f64;
    if mean.norm() <= 1e-12 {
        return Err(Error::DegenerateConfiguration);
    }
    let pole = UnitVector::normalize(mean)?;
    let lowest = s
        .states()
        .iter()
        .map(|x| pole.dot(x))
        .fold(f64::INFINITY, f64::min);
    Ok(if lowest > 0.0 {
        Containment::Certified { pole }
    } else {
        Containment::Uncertified
    })
}
