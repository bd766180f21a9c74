//! The neighbor-coupling law and its geometric Euler discretization.

use std::f64::consts::PI;

use nalgebra::DVector;

use super::state::AgentStates;
use crate::error::{Error, Result};
use crate::manifold::{angle_between, dot_slices, TangentVector, UNIT_TOL};
use crate::network::Graph;
use crate::shaping::DistanceFunction;

/// Pairs closer than this to pi are treated as antipodal.
pub const ANTIPODAL_TOL: f64 = 1e-10;

/// `u_i = sum_j a_ij w(theta_ij) (I - x_i x_i^T) x_j` with `w = f'(theta) / sin(theta)`,
/// the negative Riemannian gradient at `x_i` of `sum_j a_ij f(theta_ij)`.
pub fn control_law(
    i: usize,
    s: &AgentStates,
    g: &Graph,
    d: &DistanceFunction,
) -> Result<TangentVector> {
    check_graph(s, g)?;
    if i >= s.len() {
        return Err(Error::InvalidScenario(format!(
            "agent index {i} out of range for {} agents",
            s.len()
        )));
    }
    let flat = s.to_flat();
    let m = s.dim() + 1;
    let mut u = vec![0.0; m];
    coupling(i, &flat, m, g, d, &mut u)?;
    Ok(TangentVector::from_raw(
        s.get(i).clone(),
        DVector::from_vec(u),
    ))
}

/// One synchronous geometric Euler step `x_i <- exp_{x_i}(dt u_i)`.
pub fn step(s: &AgentStates, g: &Graph, d: &DistanceFunction, dt: f64) -> Result<AgentStates> {
    check_graph(s, g)?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidScenario(format!("step size must be positive, got {dt}")));
    }
    let m = s.dim() + 1;
    let mut flat = s.to_flat();
    let mut controls = vec![0.0; flat.len()];
    all_controls(&flat, m, g, d, &mut controls)?;
    advance(&mut flat, &controls, m, dt);
    Ok(AgentStates::from_flat(&flat, m - 1, s.time() + dt))
}

fn check_graph(s: &AgentStates, g: &Graph) -> Result<()> {
    if g.n_agents() != s.len() {
        return Err(Error::DimensionMismatch {
            expected: s.len(),
            found: g.n_agents(),
        });
    }
    Ok(())
}

/// Control of agent `i` from a flat state buffer with stride `m`, written into `out`.
pub(crate) fn coupling(
    i: usize,
    flat: &[f64],
    m: usize,
    g: &Graph,
    d: &DistanceFunction,
    out: &mut [f64],
) -> Result<()> {
    out.fill(0.0);
    let xi = &flat[i * m..(i + 1) * m];
    for &(j, a) in g.neighbors(i) {
        let xj = &flat[j * m..(j + 1) * m];
        let theta = angle_between(xi, xj);
        if theta > PI - ANTIPODAL_TOL {
            return Err(Error::SingularConfiguration {
                i: i.min(j),
                j: i.max(j),
            });
        }
        let w = a * d.coupling_weight(theta);
        let c = dot_slices(xi, xj);
        for k in 0..m {
            out[k] += w * (xj[k] - c * xi[k]);
        }
    }
    let residue = dot_slices(out, xi);
    for k in 0..m {
        out[k] -= residue * xi[k];
    }
    Ok(())
}

pub(crate) fn all_controls(
    flat: &[f64],
    m: usize,
    g: &Graph,
    d: &DistanceFunction,
    controls: &mut [f64],
) -> Result<()> {
    for i in 0..flat.len() / m {
        coupling(i, flat, m, g, d, &mut controls[i * m..(i + 1) * m])?;
    }
    Ok(())
}

/// In-place exponential-map update of every agent.
pub(crate) fn advance(flat: &mut [f64], controls: &[f64], m: usize, dt: f64) {
    for (x, u) in flat.chunks_exact_mut(m).zip(controls.chunks_exact(m)) {
        let speed = dt * u.iter().map(|c| c * c).sum::<f64>().sqrt();
        if speed == 0.0 {
            continue;
        }
        let cos = speed.cos();
        let sinc = if speed < 1e-8 {
            1.0 - speed * speed / 6.0
        } else {
            speed.sin() / speed
        };
        for k in 0..m {
            x[k] = cos * x[k] + sinc * dt * u[k];
        }
        let norm = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > UNIT_TOL {
            x.iter_mut().for_each(|c| *c /= norm);
        }
    }
}
