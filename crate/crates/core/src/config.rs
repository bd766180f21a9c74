//! Scenario configuration files.
//!
//! A config is TOML with the sections `[scenario]`, `[shaping]`, `[[graphs]]`,
//! `[signal]`, `[init]` and an optional `[output]`. Unknown keys are rejected.
//! Random parts (generated signals, sampled initial states) are drawn from the
//! scenario seed, and [`Resolved::echo`] holds the same scenario with every
//! random part written out explicitly.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DVector, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::consensus_embed;
use crate::dynamics::{AgentStates, Mode, Scenario};
use crate::manifold::{quat_mul, quat_to_rotmat, reduced_attitude, Quaternion, UnitVector};
use crate::network::{generate_switching_signal, DwellTimeSpec, Graph, SwitchingSignal};
use crate::sampling::sample_in_cap;
use crate::shaping::{DistanceFunction, ShapingKind};

pub const DEFAULT_EPSILON: f64 = 1e-6;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    /// Syntax or schema error; the message carries the line and column.
    #[error("{0}")]
    Parse(String),
    #[error("{field}: {message}")]
    Field { field: String, message: String },
}

fn field_err(field: impl Into<String>, message: impl ToString) -> ConfigError {
    ConfigError::Field {
        field: field.into(),
        message: message.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeName {
    GenericSn,
    So3CompleteViaS3,
    So3IncompleteViaS2,
    RnConsensusViaSn,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub mode: ModeName,
    pub sphere_dim: usize,
    pub n_agents: usize,
    pub dt: f64,
    /// Absolute end time of the run.
    pub horizon: f64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Embedding scale, `rn_consensus_via_sn` only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    /// Body-frame pointing axis, `so3_incomplete_via_s2` only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body_axis: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapingName {
    Chordal,
    GeodesicQuadratic,
    PowerChordal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapingSection {
    pub kind: ShapingName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain_limit: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSection {
    /// `[i, j, weight]` triples.
    pub edges: Vec<(usize, usize, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalKind {
    Explicit,
    Generated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DwellMode {
    Fixed,
    Average,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DwellSection {
    pub mode: DwellMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_d: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_a: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalSection {
    pub kind: SignalKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graphs: Option<Vec<usize>>,
    /// Declared dwell condition. Required for generated signals.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dwell: Option<DwellSection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitKind {
    Explicit,
    /// Uniform direction, uniform geodesic distance within `radius` of `center`.
    Cap,
    /// Euclidean points uniform in a ball, `rn_consensus_via_sn` only.
    Ball,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitSection {
    pub kind: InitKind,
    /// Per-agent coordinates: unit vectors, attitude quaternions `[w, x, y, z]`
    /// for the SO(3) modes, or Euclidean points for the consensus mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    /// Randomly negate sampled quaternions (`so3_complete_via_s3`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flip_signs: Option<bool>,
    /// Random rotation about the body axis (`so3_incomplete_via_s2`), default on.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twist: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub trace: String,
    /// Keep every `stride`-th sample; switch samples and the last one are always kept.
    pub stride: usize,
    pub report: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            trace: "trace.csv".into(),
            stride: 1,
            report: "report.txt".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioSection,
    pub shaping: ShapingSection,
    pub graphs: Vec<GraphSection>,
    pub signal: SignalSection,
    pub init: InitSection,
    #[serde(default)]
    pub output: OutputSection,
}

/// A config turned into a runnable scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub scenario: Scenario,
    pub epsilon: f64,
    pub output: OutputSection,
    /// The same configuration with signal and initial states written out explicitly.
    pub echo: ScenarioConfig,
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    /// Parses `text`, then applies `key=value` overrides (dotted paths, numeric
    /// segments index arrays).
    pub fn from_toml_with_overrides(
        text: &str,
        overrides: &[(String, String)],
    ) -> Result<Self, ConfigError> {
        if overrides.is_empty() {
            return Self::from_toml(text);
        }
        let mut table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
        for (key, value) in overrides {
            apply_override(&mut table, key, value)?;
        }
        toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| ConfigError::Parse(format!("after overrides: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }

    pub fn epsilon(&self) -> f64 {
        self.scenario.epsilon.unwrap_or(DEFAULT_EPSILON)
    }

    pub fn dwell_spec(&self) -> Result<Option<DwellTimeSpec>, ConfigError> {
        let Some(d) = &self.signal.dwell else {
            return Ok(None);
        };
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| field_err(format!("signal.dwell.{name}"), "missing"))
        };
        let spec = match d.mode {
            DwellMode::Fixed => {
                let tau = need(d.tau_d, "tau_d")?;
                DwellTimeSpec::fixed(tau).map_err(|e| field_err("signal.dwell.tau_d", e))?
            }
            DwellMode::Average => {
                let n0 = need(d.n0, "n0")?;
                let tau = need(d.tau_a, "tau_a")?;
                DwellTimeSpec::average(n0, tau).map_err(|e| field_err("signal.dwell", e))?
            }
        };
        Ok(Some(spec))
    }

    /// The switching signal: as listed, or generated from the dwell spec and seed.
    pub fn build_signal(&self) -> Result<SwitchingSignal, ConfigError> {
        let spec = self.dwell_spec()?;
        match self.signal.kind {
            SignalKind::Explicit => {
                let times = self
                    .signal
                    .times
                    .clone()
                    .ok_or_else(|| field_err("signal.times", "required for an explicit signal"))?;
                let graphs = self
                    .signal
                    .graphs
                    .clone()
                    .ok_or_else(|| field_err("signal.graphs", "required for an explicit signal"))?;
                SwitchingSignal::new(times, graphs).map_err(|e| field_err("signal", e))
            }
            SignalKind::Generated => {
                if self.signal.times.is_some() || self.signal.graphs.is_some() {
                    return Err(field_err(
                        "signal.times",
                        "not allowed for a generated signal",
                    ));
                }
                let spec = spec
                    .ok_or_else(|| field_err("signal.dwell", "required for a generated signal"))?;
                check_positive("scenario.horizon", self.scenario.horizon)?;
                generate_switching_signal(
                    self.scenario.seed,
                    self.graphs.len(),
                    &spec,
                    self.scenario.horizon,
                )
                .map_err(|e| field_err("signal", e))
            }
        }
    }

    pub fn resolve(&self) -> Result<Resolved, ConfigError> {
        let sc = &self.scenario;
        check_positive("scenario.dt", sc.dt)?;
        check_positive("scenario.horizon", sc.horizon)?;
        check_positive("scenario.epsilon", self.epsilon())?;
        if sc.n_agents == 0 {
            return Err(field_err("scenario.n_agents", "must be at least 1"));
        }
        if sc.sphere_dim == 0 {
            return Err(field_err("scenario.sphere_dim", "must be at least 1"));
        }
        if self.output.stride == 0 {
            return Err(field_err("output.stride", "must be at least 1"));
        }
        match sc.mode {
            ModeName::So3CompleteViaS3 if sc.sphere_dim != 3 => {
                return Err(field_err("scenario.sphere_dim", "so3_complete_via_s3 needs 3"))
            }
            ModeName::So3IncompleteViaS2 if sc.sphere_dim != 2 => {
                return Err(field_err("scenario.sphere_dim", "so3_incomplete_via_s2 needs 2"))
            }
            _ => {}
        }
        if sc.rho.is_some() && sc.mode != ModeName::RnConsensusViaSn {
            return Err(field_err("scenario.rho", "only used by rn_consensus_via_sn"));
        }
        if sc.body_axis.is_some() && sc.mode != ModeName::So3IncompleteViaS2 {
            return Err(field_err("scenario.body_axis", "only used by so3_incomplete_via_s2"));
        }

        let shaping = self.build_shaping()?;
        if self.graphs.is_empty() {
            return Err(field_err("graphs", "at least one graph is required"));
        }
        let graphs = self
            .graphs
            .iter()
            .enumerate()
            .map(|(k, g)| {
                Graph::new(sc.n_agents, g.edges.iter().copied())
                    .map_err(|e| field_err(format!("graphs[{k}].edges"), e))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let signal = self.build_signal()?;
        if signal.max_graph_index() >= graphs.len() {
            return Err(field_err(
                "signal.graphs",
                format!(
                    "index {} out of range for {} graphs",
                    signal.max_graph_index(),
                    graphs.len()
                ),
            ));
        }
        if sc.horizon <= signal.start() {
            return Err(field_err("scenario.horizon", "must be after the first switch time"));
        }
        let dwell = self.dwell_spec()?;
        let (init, mode, coords) = self.build_init(signal.start())?;

        let scenario = Scenario {
            graphs,
            signal: signal.clone(),
            dwell,
            shaping,
            init,
            dt: sc.dt,
            horizon: sc.horizon,
            mode,
        };
        scenario
            .validate()
            .map_err(|e| field_err("scenario", e))?;

        let mut echo = self.clone();
        echo.signal.kind = SignalKind::Explicit;
        echo.signal.times = Some(signal.switch_times().to_vec());
        echo.signal.graphs = Some(signal.graph_indices().to_vec());
        echo.init = InitSection {
            kind: InitKind::Explicit,
            coords: Some(coords),
            center: None,
            radius: None,
            flip_signs: None,
            twist: None,
        };
        Ok(Resolved {
            scenario,
            epsilon: self.epsilon(),
            output: self.output.clone(),
            echo,
        })
    }

    fn build_shaping(&self) -> Result<DistanceFunction, ConfigError> {
        let s = &self.shaping;
        let kind = match s.kind {
            ShapingName::Chordal => ShapingKind::Chordal,
            ShapingName::GeodesicQuadratic => ShapingKind::GeodesicQuadratic,
            ShapingName::PowerChordal => ShapingKind::PowerChordal {
                p: s.p.ok_or_else(|| field_err("shaping.p", "required for power_chordal"))?,
            },
        };
        if s.p.is_some() && s.kind != ShapingName::PowerChordal {
            return Err(field_err("shaping.p", "only used by power_chordal"));
        }
        let field = if matches!(kind, ShapingKind::PowerChordal { p } if !(p >= 1.0)) {
            "shaping.p"
        } else {
            "shaping.domain_limit"
        };
        DistanceFunction::new(kind, s.domain_limit.unwrap_or(FRAC_PI_2))
            .map_err(|e| field_err(field, e))
    }

    /// Initial states, the matching mode, and the explicit coordinates for the echo.
    fn build_init(&self, t0: f64) -> Result<(AgentStates, Mode, Vec<Vec<f64>>), ConfigError> {
        let sc = &self.scenario;
        let init = &self.init;
        let mut rng = ChaCha8Rng::seed_from_u64(sc.seed);
        rng.set_stream(1);
        let n = sc.n_agents;

        let allowed = |name: &str, present: bool, ok: bool| {
            if present && !ok {
                Err(field_err(format!("init.{name}"), "not used by this init kind or mode"))
            } else {
                Ok(())
            }
        };
        let sampling = init.kind != InitKind::Explicit;
        allowed("coords", init.coords.is_some(), !sampling)?;
        allowed("center", init.center.is_some(), sampling)?;
        allowed("radius", init.radius.is_some(), sampling)?;
        allowed(
            "flip_signs",
            init.flip_signs.is_some(),
            sampling && sc.mode == ModeName::So3CompleteViaS3,
        )?;
        allowed(
            "twist",
            init.twist.is_some(),
            sampling && sc.mode == ModeName::So3IncompleteViaS2,
        )?;
        let ball = init.kind == InitKind::Ball;
        if ball != (sc.mode == ModeName::RnConsensusViaSn) && sampling {
            return Err(field_err(
                "init.kind",
                "ball sampling is the only sampler for rn_consensus_via_sn and is not used elsewhere",
            ));
        }

        let explicit = |len: usize| -> Result<Vec<Vec<f64>>, ConfigError> {
            let coords = init
                .coords
                .clone()
                .ok_or_else(|| field_err("init.coords", "required for explicit init"))?;
            if coords.len() != n {
                return Err(field_err(
                    "init.coords",
                    format!("expected {n} entries, found {}", coords.len()),
                ));
            }
            for (i, c) in coords.iter().enumerate() {
                if c.len() != len {
                    return Err(field_err(
                        format!("init.coords[{i}]"),
                        format!("expected {len} components, found {}", c.len()),
                    ));
                }
            }
            Ok(coords)
        };
        let cap = |len: usize| -> Result<(UnitVector, f64), ConfigError> {
            let center = init
                .center
                .as_ref()
                .ok_or_else(|| field_err("init.center", "required for cap sampling"))?;
            if center.len() != len {
                return Err(field_err(
                    "init.center",
                    format!("expected {len} components, found {}", center.len()),
                ));
            }
            let center = unit_or_normalized(center).map_err(|e| field_err("init.center", e))?;
            let radius = init
                .radius
                .ok_or_else(|| field_err("init.radius", "required for cap sampling"))?;
            if !(radius > 0.0 && radius <= PI) {
                return Err(field_err("init.radius", "must lie in (0, pi]"));
            }
            Ok((center, radius))
        };
        let units = |coords: &[Vec<f64>]| -> Result<Vec<UnitVector>, ConfigError> {
            coords
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    unit_or_normalized(c).map_err(|e| field_err(format!("init.coords[{i}]"), e))
                })
                .collect()
        };
        let states = |v: Vec<UnitVector>| {
            AgentStates::new(v, t0).map_err(|e| field_err("init", e))
        };

        match sc.mode {
            ModeName::GenericSn => {
                let dim = sc.sphere_dim + 1;
                let coords = match init.kind {
                    InitKind::Explicit => explicit(dim)?,
                    _ => {
                        let (center, radius) = cap(dim)?;
                        (0..n)
                            .map(|_| sample_in_cap(&mut rng, &center, radius).as_slice().to_vec())
                            .collect()
                    }
                };
                let x = units(&coords)?;
                let coords = x.iter().map(|u| u.as_slice().to_vec()).collect();
                Ok((states(x)?, Mode::GenericSn, coords))
            }
            ModeName::So3CompleteViaS3 => {
                let coords = match init.kind {
                    InitKind::Explicit => explicit(4)?,
                    _ => {
                        let (center, radius) = cap(4)?;
                        let flip = init.flip_signs.unwrap_or(false);
                        (0..n)
                            .map(|_| {
                                let q = sample_in_cap(&mut rng, &center, radius);
                                let q = if flip && rng.random_bool(0.5) { q.neg() } else { q };
                                q.as_slice().to_vec()
                            })
                            .collect()
                    }
                };
                let x = units(&coords)?;
                let coords = x.iter().map(|u| u.as_slice().to_vec()).collect();
                Ok((states(x)?, Mode::So3CompleteViaS3, coords))
            }
            ModeName::So3IncompleteViaS2 => {
                let axis = sc.body_axis.clone().unwrap_or_else(|| vec![0.0, 0.0, 1.0]);
                if axis.len() != 3 {
                    return Err(field_err("scenario.body_axis", "expected 3 components"));
                }
                let b = unit_or_normalized(&axis).map_err(|e| field_err("scenario.body_axis", e))?;
                let b3 = Vector3::from_column_slice(b.as_slice());
                let quats: Vec<Quaternion> = match init.kind {
                    InitKind::Explicit => units(&explicit(4)?)?
                        .iter()
                        .map(|u| Quaternion::from_unit_vector(u).map_err(|e| field_err("init.coords", e)))
                        .collect::<Result<_, _>>()?,
                    _ => {
                        let (center, radius) = cap(3)?;
                        let twist = init.twist.unwrap_or(true);
                        (0..n)
                            .map(|i| {
                                let x = sample_in_cap(&mut rng, &center, radius);
                                let x3 = Vector3::from_column_slice(x.as_slice());
                                let align = Quaternion::from_two_vectors(&b3, &x3)
                                    .map_err(|e| field_err(format!("init agent {i}"), e))?;
                                if twist {
                                    let phi = rng.random_range(-PI..PI);
                                    let spin = Quaternion::from_axis_angle(&b3, phi)
                                        .map_err(|e| field_err("scenario.body_axis", e))?;
                                    Ok(quat_mul(&align, &spin))
                                } else {
                                    Ok(align)
                                }
                            })
                            .collect::<Result<_, _>>()?
                    }
                };
                let rotations: Vec<_> = quats.iter().map(quat_to_rotmat).collect();
                let pointing = rotations
                    .iter()
                    .map(|r| reduced_attitude(r, &b).map_err(|e| field_err("init", e)))
                    .collect::<Result<Vec<_>, _>>()?;
                let coords = quats.iter().map(|q| q.to_array().to_vec()).collect();
                Ok((
                    states(pointing)?,
                    Mode::So3IncompleteViaS2 {
                        body_axis: b,
                        rotations,
                    },
                    coords,
                ))
            }
            ModeName::RnConsensusViaSn => {
                let rho = sc
                    .rho
                    .ok_or_else(|| field_err("scenario.rho", "required for rn_consensus_via_sn"))?;
                check_positive("scenario.rho", rho)?;
                let dim = sc.sphere_dim;
                let coords = match init.kind {
                    InitKind::Explicit => explicit(dim)?,
                    _ => {
                        let center = init.center.clone().unwrap_or_else(|| vec![0.0; dim]);
                        if center.len() != dim {
                            return Err(field_err("init.center", format!("expected {dim} components")));
                        }
                        let radius = init
                            .radius
                            .ok_or_else(|| field_err("init.radius", "required for ball sampling"))?;
                        check_positive("init.radius", radius)?;
                        (0..n)
                            .map(|_| {
                                let u = sample_ball(&mut rng, dim);
                                center.iter().zip(&u).map(|(c, v)| c + radius * v).collect()
                            })
                            .collect()
                    }
                };
                let points: Vec<DVector<f64>> =
                    coords.iter().map(|c| DVector::from_column_slice(c)).collect();
                if points.iter().any(|p| !p.iter().all(|v| v.is_finite())) {
                    return Err(field_err("init.coords", "non-finite coordinate"));
                }
                let embedded = consensus_embed(&points, rho).map_err(|e| field_err("init", e))?;
                let x = embedded.states.with_time(t0);
                Ok((x, Mode::RnConsensusViaSn { rho }, coords))
            }
        }
    }
}

fn check_positive(field: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(field_err(field, format!("must be positive and finite, got {v}")))
    }
}

/// Unit vectors are kept bit for bit so that echoed configs reproduce the same states.
fn unit_or_normalized(c: &[f64]) -> crate::Result<UnitVector> {
    UnitVector::from_slice(c).or_else(|_| UnitVector::normalize(DVector::from_column_slice(c)))
}

fn sample_ball<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        if v.iter().map(|x| x * x).sum::<f64>() < 1.0 {
            return v;
        }
    }
}

/// Sets `key` (dotted path) in `root` to `raw`, read as a TOML value when it parses
/// as one and as a string otherwise.
pub fn apply_override(root: &mut toml::Table, key: &str, raw: &str) -> Result<(), ConfigError> {
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(field_err(key, "malformed override key"));
    }
    let mut node = toml::Value::Table(std::mem::take(root));
    let result = set_path(&mut node, &parts, 0, parse_value(raw));
    if let toml::Value::Table(t) = node {
        *root = t;
    }
    result
}

fn set_path(
    node: &mut toml::Value,
    parts: &[&str],
    depth: usize,
    value: toml::Value,
) -> Result<(), ConfigError> {
    let part = parts[depth];
    let last = depth + 1 == parts.len();
    let here = || parts[..=depth].join(".");
    let child = match node {
        toml::Value::Table(t) => {
            if last {
                t.insert(part.to_string(), value);
                return Ok(());
            }
            t.entry(part.to_string())
                .or_insert_with(|| toml::Value::Table(toml::Table::new()))
        }
        toml::Value::Array(a) => {
            let idx: usize = part
                .parse()
                .map_err(|_| field_err(here(), "expected an array index"))?;
            let len = a.len();
            let slot = a
                .get_mut(idx)
                .ok_or_else(|| field_err(here(), format!("index out of range ({len})")))?;
            if last {
                *slot = value;
                return Ok(());
            }
            slot
        }
        _ => return Err(field_err(parts[..depth].join("."), "is not a table")),
    };
    set_path(child, parts, depth + 1, value)
}

fn parse_value(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

/// Splits `key=value`.
pub fn parse_assignment(s: &str) -> Result<(String, String), ConfigError> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| field_err(s, "expected KEY=VALUE"))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}
