//! Castings of SO(3) attitude synchronization onto spheres.
//!
//! Complete synchronization runs on S^3 through unit quaternions, reduced
//! attitude synchronization runs on S^2 through the pointing direction of a
//! body axis.

use std::collections::VecDeque;

use super::state::AgentStates;
use crate::error::{Error, Result};
use crate::manifold::{quat_to_rotmat, reduced_attitude, Quaternion, RotationMatrix, UnitVector};
use crate::network::Graph;

fn require_dim(s: &AgentStates, dim: usize) -> Result<()> {
    if s.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim + 1,
            found: s.dim() + 1,
        });
    }
    Ok(())
}

/// Rotation of every agent from its quaternion on S^3.
pub fn lift_so3_complete(quats: &AgentStates) -> Result<Vec<RotationMatrix>> {
    require_dim(quats, 3)?;
    quats
        .states()
        .iter()
        .map(|q| Ok(quat_to_rotmat(&Quaternion::from_unit_vector(q)?)))
        .collect()
}

/// Reduced attitudes `R_i b` on S^2.
pub fn project_so3_incomplete(rots: &[RotationMatrix], b: &UnitVector) -> Result<AgentStates> {
    let states = rots
        .iter()
        .map(|r| reduced_attitude(r, b))
        .collect::<Result<Vec<_>>>()?;
    AgentStates::new(states, 0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignAlignment {
    pub states: AgentStates,
    /// Whether every edge now has `<q_i, q_j> >= 0`. When false, `states` is the input.
    pub aligned: bool,
    pub flipped: Vec<bool>,
}

/// Chooses quaternion representatives so that neighbors have nonnegative inner
/// product. Flipping `q -> -q` leaves the rotation unchanged.
///
/// Edges with nonzero inner product fix the relative sign of their endpoints;
/// within each component of those edges the assignment is unique up to a
/// global sign, so a propagation from the lowest-indexed agent either finds
/// the assignment or proves none exists.
pub fn quaternion_sign_align(s: &AgentStates, g: &Graph) -> Result<SignAlignment> {
    require_dim(s, 3)?;
    if g.n_agents() != s.len() {
        return Err(Error::DimensionMismatch {
            expected: s.len(),
            found: g.n_agents(),
        });
    }
    let n = s.len();
    let dot = |i: usize, j: usize| s.get(i).dot(s.get(j));
    let mut sign: Vec<Option<bool>> = vec![None; n];
    for root in 0..n {
        if sign[root].is_some() {
            continue;
        }
        sign[root] = Some(false);
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            let flip_v = sign[v].unwrap();
            for &(j, _) in g.neighbors(v) {
                let c = dot(v, j);
                if sign[j].is_none() && c != 0.0 {
                    sign[j] = Some(flip_v ^ (c < 0.0));
                    queue.push_back(j);
                }
            }
        }
    }
    let flipped: Vec<bool> = sign.into_iter().map(|f| f.unwrap_or(false)).collect();
    let signed = |i: usize| if flipped[i] { -1.0 } else { 1.0 };
    let aligned = g
        .edges()
        .iter()
        .all(|e| signed(e.i) * signed(e.j) * dot(e.i, e.j) >= 0.0);
    if !aligned {
        return Ok(SignAlignment {
            states: s.clone(),
            aligned,
            flipped: vec![false; n],
        });
    }
    let states = s
        .states()
        .iter()
        .zip(&flipped)
        .map(|(q, f)| if *f { q.neg() } else { q.clone() })
        .collect();
    Ok(SignAlignment {
        states: AgentStates::new(states, s.time())?,
        aligned,
        flipped,
    })
}
