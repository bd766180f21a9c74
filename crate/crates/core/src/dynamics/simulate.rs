use nalgebra::Vector3;

use super::casting::quaternion_sign_align;
use super::law::{advance, all_controls};
use super::state::AgentStates;
use crate::analysis::{edge_energy, max_pairwise_angle};
use crate::error::{Error, Result};
use crate::manifold::{
    quat_mul, quat_to_rotmat, reduced_attitude, rotmat_to_quat, Quaternion, RotationMatrix,
    UnitVector,
};
use crate::network::{validate_dwell, DwellTimeSpec, Graph, SwitchingSignal};
use crate::shaping::DistanceFunction;

/// Per-step tolerance on Lyapunov increase, relative to the step length.
pub const MONOTONICITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub enum Mode {
    /// Synchronization on S^n as is.
    GenericSn,
    /// Full attitudes as unit quaternions on S^3; signs are aligned before integration.
    So3CompleteViaS3,
    /// Pointing directions `R_i b` on S^2. The attitudes are carried along with the
    /// minimal angular velocity `omega_i = x_i x u_i`, which leaves the rotation
    /// about `b` untouched.
    So3IncompleteViaS2 {
        body_axis: UnitVector,
        rotations: Vec<RotationMatrix>,
    },
    /// Euclidean points embedded stereographically with scale `rho`.
    RnConsensusViaSn { rho: f64 },
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::GenericSn => "generic_sn",
            Mode::So3CompleteViaS3 => "so3_complete_via_s3",
            Mode::So3IncompleteViaS2 { .. } => "so3_incomplete_via_s2",
            Mode::RnConsensusViaSn { .. } => "rn_consensus_via_sn",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub graphs: Vec<Graph>,
    pub signal: SwitchingSignal,
    /// Dwell condition the signal is declared to satisfy; checked before integration.
    pub dwell: Option<DwellTimeSpec>,
    pub shaping: DistanceFunction,
    pub init: AgentStates,
    pub dt: f64,
    /// End time; integration runs on `[signal.start(), horizon]`.
    pub horizon: f64,
    pub mode: Mode,
}

impl Scenario {
    pub fn sphere_dim(&self) -> usize {
        self.init.dim()
    }

    pub fn n_agents(&self) -> usize {
        self.init.len()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidScenario(msg));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be positive and finite, got {}", self.dt));
        }
        if !(self.horizon > self.signal.start() && self.horizon.is_finite()) {
            return bad(format!(
                "horizon {} must be finite and after the signal start {}",
                self.horizon,
                self.signal.start()
            ));
        }
        if self.graphs.is_empty() {
            return bad("graph library is empty".into());
        }
        if let Some(g) = self.graphs.iter().find(|g| g.n_agents() != self.n_agents()) {
            return bad(format!(
                "graph has {} agents, scenario has {}",
                g.n_agents(),
                self.n_agents()
            ));
        }
        if self.signal.max_graph_index() >= self.graphs.len() {
            return bad(format!(
                "signal references graph {} but the library has {}",
                self.signal.max_graph_index(),
                self.graphs.len()
            ));
        }
        match &self.mode {
            Mode::GenericSn => {}
            Mode::So3CompleteViaS3 if self.sphere_dim() != 3 => {
                return bad(format!(
                    "so3_complete_via_s3 needs sphere_dim 3, got {}",
                    self.sphere_dim()
                ))
            }
            Mode::So3CompleteViaS3 => {}
            Mode::So3IncompleteViaS2 {
                body_axis,
                rotations,
            } => {
                if self.sphere_dim() != 2 || body_axis.dim() != 2 {
                    return bad("so3_incomplete_via_s2 needs sphere_dim 2".into());
                }
                if rotations.len() != self.n_agents() {
                    return bad("one rotation per agent is required".into());
                }
                for (r, x) in rotations.iter().zip(self.init.states()) {
                    let pointing = reduced_attitude(r, body_axis)?;
                    if (pointing.coords() - x.coords()).norm() > 1e-9 {
                        return bad("initial states differ from the reduced attitudes".into());
                    }
                }
            }
            Mode::RnConsensusViaSn { rho } => {
                if !(*rho > 0.0 && rho.is_finite()) {
                    return bad(format!("rho must be positive, got {rho}"));
                }
            }
        }
        if let Some(spec) = &self.dwell {
            spec.validate()?;
        }
        Ok(())
    }

    /// Graph that must be connected for sign alignment: union of the graphs the
    /// signal activates before the horizon.
    pub fn active_union(&self) -> Result<Graph> {
        let mut used: Vec<usize> = self
            .signal
            .graph_indices()
            .iter()
            .zip(self.signal.switch_times())
            .filter(|(_, t)| **t <= self.horizon)
            .map(|(g, _)| *g)
            .collect();
        used.sort_unstable();
        used.dedup();
        let mut union = self.graphs[used[0]].clone();
        for &g in &used[1..] {
            union = union.union(&self.graphs[g])?;
        }
        Ok(union)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub time: f64,
    /// Position of the active interval in the switching signal.
    pub interval: usize,
    pub graph_index: usize,
    pub lyapunov: f64,
    pub sync_error: f64,
    /// Row-major agent coordinates, `n_agents * (sphere_dim + 1)` entries.
    pub states: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TraceEvent {
    Switch { time: f64, graph_index: usize },
    LyapunovIncrease { time: f64, increase: f64 },
    SignAlignmentFailed,
    Singular { time: f64, i: usize, j: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub sphere_dim: usize,
    pub n_agents: usize,
    pub samples: Vec<Sample>,
    pub events: Vec<TraceEvent>,
    /// Attitudes at the last sample, for the SO(3) castings.
    pub final_rotations: Option<Vec<RotationMatrix>>,
}

impl Trace {
    pub fn truncated(&self) -> bool {
        self.events
            .iter()
            .any(|e| matches!(e, TraceEvent::Singular { .. }))
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trace has at least the initial sample")
    }

    pub fn states_at(&self, k: usize) -> AgentStates {
        AgentStates::from_flat(&self.samples[k].states, self.sphere_dim, self.samples[k].time)
    }

    pub fn final_states(&self) -> AgentStates {
        self.states_at(self.samples.len() - 1)
    }
}

/// Integrates the closed loop from `sc.init` to `sc.horizon`.
///
/// Fixed steps of `dt`, shortened so the grid lands on every switch instant.
/// A singular configuration ends the run early with a `Singular` event.
pub fn simulate(sc: &Scenario) -> Result<Trace> {
    sc.validate()?;
    if let Some(spec) = &sc.dwell {
        let report = validate_dwell(&sc.signal, spec, sc.horizon);
        if !report.ok {
            return Err(Error::DwellViolation {
                margin: report.margin,
                tau: report.worst_pair.0,
                t: report.worst_pair.1,
            });
        }
    }

    let m = sc.sphere_dim() + 1;
    let mut events = Vec::new();
    let mut flat = match sc.mode {
        Mode::So3CompleteViaS3 => {
            let alignment = quaternion_sign_align(&sc.init, &sc.active_union()?)?;
            if !alignment.aligned {
                events.push(TraceEvent::SignAlignmentFailed);
            }
            alignment.states.to_flat()
        }
        _ => sc.init.to_flat(),
    };
    let mut attitudes: Option<Vec<Quaternion>> = match &sc.mode {
        Mode::So3IncompleteViaS2 { rotations, .. } => {
            Some(rotations.iter().map(rotmat_to_quat).collect::<Result<_>>()?)
        }
        _ => None,
    };

    let times = sc.signal.switch_times();
    let n_intervals = times.partition_point(|t| *t <= sc.horizon);
    let mut samples = Vec::new();
    let mut controls = vec![0.0; flat.len()];

    let record = |t: f64, k: usize, flat: &[f64], samples: &mut Vec<Sample>| {
        let graph_index = sc.signal.graph_indices()[k];
        samples.push(Sample {
            time: t,
            interval: k,
            graph_index,
            lyapunov: edge_energy(flat, m, &sc.graphs[graph_index], &sc.shaping),
            sync_error: max_pairwise_angle(flat, m),
            states: flat.to_vec(),
        });
    };

    'intervals: for k in 0..n_intervals {
        let a = times[k];
        let b = if k + 1 < n_intervals {
            times[k + 1]
        } else {
            sc.horizon
        };
        let graph_index = sc.signal.graph_indices()[k];
        let graph = &sc.graphs[graph_index];
        if k > 0 {
            events.push(TraceEvent::Switch {
                time: a,
                graph_index,
            });
        }
        record(a, k, &flat, &mut samples);
        if b <= a {
            continue;
        }
        let n_steps = (((b - a) / sc.dt) - 1e-9).ceil().max(1.0) as usize;
        let mut t = a;
        for step in 0..n_steps {
            let next = if step + 1 == n_steps {
                b
            } else {
                a + (step + 1) as f64 * sc.dt
            };
            let h = next - t;
            if let Err(Error::SingularConfiguration { i, j }) =
                all_controls(&flat, m, graph, &sc.shaping, &mut controls)
            {
                events.push(TraceEvent::Singular { time: t, i, j });
                break 'intervals;
            }
            if let Some(quats) = attitudes.as_mut() {
                rotate_attitudes(quats, &flat, &controls, h);
            }
            advance(&mut flat, &controls, m, h);
            t = next;
            let last_of_run = step + 1 == n_steps && k + 1 == n_intervals;
            if step + 1 < n_steps || last_of_run {
                let before = samples.last().map(|s: &Sample| s.lyapunov);
                record(t, k, &flat, &mut samples);
                let after = samples.last().unwrap().lyapunov;
                if let Some(v) = before {
                    if after - v > MONOTONICITY_TOL * h {
                        events.push(TraceEvent::LyapunovIncrease {
                            time: t,
                            increase: after - v,
                        });
                    }
                }
            }
        }
    }

    let final_rotations = attitudes.map(|qs| qs.iter().map(quat_to_rotmat).collect());
    Ok(Trace {
        sphere_dim: sc.sphere_dim(),
        n_agents: sc.n_agents(),
        samples,
        events,
        final_rotations,
    })
}

/// `q_i <- exp(h (x_i x u_i)) q_i`, the world-frame rotation whose action on
/// `x_i` is exactly the sphere exponential step.
fn rotate_attitudes(quats: &mut [Quaternion], flat: &[f64], controls: &[f64], h: f64) {
    for (i, q) in quats.iter_mut().enumerate() {
        let x = Vector3::from_column_slice(&flat[3 * i..3 * i + 3]);
        let u = Vector3::from_column_slice(&controls[3 * i..3 * i + 3]);
        let omega = x.cross(&u) * h;
        let angle = omega.norm();
        if angle == 0.0 {
            continue;
        }
        let incr = Quaternion::from_axis_angle(&omega, angle).expect("nonzero axis");
        *q = quat_mul(&incr, q);
    }
}
