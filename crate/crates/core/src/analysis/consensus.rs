//! Euclidean consensus cast as synchronization on S^n.
//!
//! Points `z in R^n` map to the sphere by the scaled inverse stereographic
//! projection from the south pole,
//! `x = (2 rho z, rho^2 - |z|^2) / (rho^2 + |z|^2)`, which sends the ball
//! `|z| < rho` onto the open northern hemisphere and `z = 0` to the north pole.

use nalgebra::DVector;

use crate::dynamics::{simulate, AgentStates, Mode, Scenario};
use crate::error::{Error, Result};
use crate::manifold::UnitVector;
use crate::network::{Graph, SwitchingSignal};
use crate::shaping::DistanceFunction;

#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusEmbedding {
    pub states: AgentStates,
    /// Agents with `|z| >= rho`, mapped outside the open northern hemisphere.
    pub outside_hemisphere: Vec<usize>,
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::InvalidScenario(format!("rho must be positive, got {rho}")));
    }
    Ok(())
}

pub fn consensus_embed(z: &[DVector<f64>], rho: f64) -> Result<ConsensusEmbedding> {
    check_rho(rho)?;
    let n = z
        .first()
        .ok_or_else(|| Error::InvalidScenario("no points to embed".into()))?
        .len();
    if n == 0 {
        return Err(Error::InvalidDimension(1));
    }
    let rho2 = rho * rho;
    let mut states = Vec::with_capacity(z.len());
    let mut outside = Vec::new();
    for (agent, p) in z.iter().enumerate() {
        if p.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: p.len(),
            });
        }
        let r2 = p.norm_squared();
        if r2 >= rho2 {
            outside.push(agent);
        }
        let denom = rho2 + r2;
        let mut x = DVector::zeros(n + 1);
        for k in 0..n {
            x[k] = 2.0 * rho * p[k] / denom;
        }
        x[n] = (rho2 - r2) / denom;
        states.push(UnitVector::normalize(x)?);
    }
    Ok(ConsensusEmbedding {
        states: AgentStates::new(states, 0.0)?,
        outside_hemisphere: outside,
    })
}

/// Inverse of [`consensus_embed`]: `z = rho x_{1..n} / (1 + x_{n+1})`.
pub fn consensus_unembed(s: &AgentStates, rho: f64) -> Result<Vec<DVector<f64>>> {
    check_rho(rho)?;
    let n = s.dim();
    s.states()
        .iter()
        .enumerate()
        .map(|(agent, x)| {
            let c = x.as_slice();
            let lift = 1.0 + c[n];
            if lift <= 1e-14 {
                return Err(Error::SingularProjection { agent });
            }
            Ok(DVector::from_iterator(n, c[..n].iter().map(|v| rho * v / lift)))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusComparison {
    /// Sup-norm gap between the two agreement values (agent means) at the horizon.
    pub max_deviation: f64,
    /// Largest pairwise Euclidean distance under linear consensus at the horizon.
    pub linear_disagreement: f64,
    /// Largest pairwise Euclidean distance of the unembedded sphere states.
    pub sphere_disagreement: f64,
    pub linear_agreement: DVector<f64>,
    pub sphere_agreement: DVector<f64>,
}

fn disagreement(z: &[DVector<f64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in z.iter().enumerate() {
        for b in &z[i + 1..] {
            worst = worst.max((a - b).norm());
        }
    }
    worst
}

fn mean(z: &[DVector<f64>]) -> DVector<f64> {
    let mut m = DVector::zeros(z[0].len());
    for p in z {
        m += p;
    }
    m / z.len() as f64
}

/// Runs Laplacian consensus `z' = -L z` (explicit Euler, step `dt`) next to the
/// sphere flow of the embedded points and compares where both end up.
pub fn consensus_oracle_compare(
    z0: &[DVector<f64>],
    g: &Graph,
    horizon: f64,
    dt: f64,
    rho: f64,
) -> Result<ConsensusComparison> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    if g.n_agents() != z0.len() {
        return Err(Error::DimensionMismatch {
            expected: z0.len(),
            found: g.n_agents(),
        });
    }
    if !(dt > 0.0 && horizon > 0.0) {
        return Err(Error::InvalidScenario("dt and horizon must be positive".into()));
    }
    let embedding = consensus_embed(z0, rho)?;

    let mut z: Vec<DVector<f64>> = z0.to_vec();
    let n_steps = ((horizon / dt) - 1e-9).ceil().max(1.0) as usize;
    let mut t = 0.0;
    for step in 0..n_steps {
        let next = if step + 1 == n_steps {
            horizon
        } else {
            (step + 1) as f64 * dt
        };
        let h = next - t;
        let flows: Vec<DVector<f64>> = (0..z.len())
            .map(|i| {
                let mut f = DVector::zeros(z[i].len());
                for &(j, a) in g.neighbors(i) {
                    f += (&z[j] - &z[i]) * a;
                }
                f
            })
            .collect();
        for (p, f) in z.iter_mut().zip(flows) {
            *p += f * h;
        }
        t = next;
    }

    let scenario = Scenario {
        graphs: vec![g.clone()],
        signal: SwitchingSignal::constant(0.0, 0),
        dwell: None,
        shaping: DistanceFunction::chordal(),
        init: embedding.states,
        dt,
        horizon,
        mode: Mode::RnConsensusViaSn { rho },
    };
    let trace = simulate(&scenario)?;
    let sphere = consensus_unembed(&trace.final_states(), rho)?;

    let linear_agreement = mean(&z);
    let sphere_agreement = mean(&sphere);
    Ok(ConsensusComparison {
        max_deviation: (&linear_agreement - &sphere_agreement).amax(),
        linear_disagreement: disagreement(&z),
        sphere_disagreement: disagreement(&sphere),
        linear_agreement,
        sphere_agreement,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn v(c: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(c)
    }

    #[test]
    fn origin_maps_to_north_pole() {
        let e = consensus_embed(&[v(&[0.0, 0.0])], 3.0).unwrap();
        assert_eq!(e.states.get(0).as_slice(), &[0.0, 0.0, 1.0]);
        assert!(e.outside_hemisphere.is_empty());
        let back = consensus_unembed(&e.states, 3.0).unwrap();
        assert_eq!(back[0], v(&[0.0, 0.0]));
    }

    #[test]
    fn radius_rho_maps_to_equator() {
        let e = consensus_embed(&[v(&[3.0, 4.0]), v(&[1.0, 0.0])], 5.0).unwrap();
        assert_eq!(e.states.get(0).as_slice()[2], 0.0);
        assert_eq!(e.outside_hemisphere, vec![0]);
    }

    #[test]
    fn round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let rho = 2.5;
        let pts: Vec<DVector<f64>> = (0..1000)
            .map(|_| loop {
                let p = v(&[rng.random_range(-rho..rho), rng.random_range(-rho..rho), rng.random_range(-rho..rho)]);
                if p.norm() < rho {
                    break p;
                }
            })
            .collect();
        let e = consensus_embed(&pts, rho).unwrap();
        let back = consensus_unembed(&e.states, rho).unwrap();
        let worst = pts.iter().zip(&back).map(|(a, b)| (a - b).amax()).fold(0.0, f64::max);
        assert!(worst <= 1e-10, "{worst}");
    }

    #[test]
    fn odd_symmetry() {
        let e = consensus_embed(&[v(&[0.7, -0.2]), v(&[-0.7, 0.2])], 2.0).unwrap();
        let (a, b) = (e.states.get(0).as_slice(), e.states.get(1).as_slice());
        assert_eq!(a[0], -b[0]);
        assert_eq!(a[1], -b[1]);
        assert_eq!(a[2], b[2]);
    }

    #[test]
    fn agreement_iff_synchronization() {
        let same = consensus_embed(&vec![v(&[0.4, 1.1]); 3], 10.0).unwrap();
        assert!(same.states.states().iter().all(|x| x == same.states.get(0)));
        let diff = consensus_embed(&[v(&[0.4, 1.1]), v(&[0.4, 1.1 + 1e-12])], 10.0).unwrap();
        assert_ne!(diff.states.get(0), diff.states.get(1));
    }

    #[test]
    fn south_pole_is_singular() {
        let s = AgentStates::new(vec![UnitVector::basis(2, 0), UnitVector::basis(2, 2).neg()], 0.0)
            .unwrap();
        assert!(matches!(
            consensus_unembed(&s, 1.0),
            Err(Error::SingularProjection { agent: 1 })
        ));
    }

    #[test]
    fn equal_points_do_not_move() {
        let z0 = vec![v(&[0.3, -0.5]); 4];
        let r = consensus_oracle_compare(&z0, &Graph::ring(4).unwrap(), 1.0, 1e-3, 10.0).unwrap();
        assert_eq!(r.linear_disagreement, 0.0);
        assert_eq!(r.sphere_disagreement, 0.0);
        assert!(r.max_deviation <= 1e-14);
    }

    #[test]
    fn scalar_pair_agrees() {
        let z0 = vec![v(&[1.0]), v(&[-1.0])];
        let r = consensus_oracle_compare(&z0, &Graph::path(2).unwrap(), 50.0, 1e-3, 10.0).unwrap();
        assert!(r.linear_disagreement <= 1e-6);
        assert!(r.sphere_disagreement <= 1e-6);
        // the symmetric pair meets at the origin in both systems
        assert!(r.max_deviation <= 1e-12);
    }

    #[test]
    fn refuses_disconnected() {
        let z0 = vec![v(&[1.0]), v(&[-1.0]), v(&[0.0])];
        assert!(matches!(
            consensus_oracle_compare(&z0, &Graph::empty(3).unwrap(), 1.0, 1e-3, 10.0),
            Err(Error::Disconnected)
        ));
    }
}
