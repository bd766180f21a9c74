//! Built-in scenarios.
//!
//! The parameters (agent counts, graphs, dwell times, caps, horizons) are
//! chosen for this implementation to satisfy the certified hypotheses with
//! margin and to reach 1e-6 well before the horizon. They are not taken from
//! published experiments.

use crate::config::{ConfigError, ScenarioConfig};

pub const PRESET_NAMES: [&str; 3] = ["so3-complete", "s2-pointing", "rn-consensus"];

/// Six attitudes as quaternions on S^3, switching among a ring, a star and a
/// ladder every 0.2 to 0.4 s. Initial quaternions have random signs; the cap
/// radius keeps every pair within a right angle so sign alignment succeeds.
pub const SO3_COMPLETE: &str = r#"[scenario]
mode = "so3_complete_via_s3"
sphere_dim = 3
n_agents = 6
dt = 0.001
horizon = 30.0
seed = 1

[shaping]
kind = "chordal"

[[graphs]]
edges = [[0, 1, 1.0], [1, 2, 1.0], [2, 3, 1.0], [3, 4, 1.0], [4, 5, 1.0], [0, 5, 1.0]]

[[graphs]]
edges = [[0, 1, 1.0], [0, 2, 1.0], [0, 3, 1.0], [0, 4, 1.0], [0, 5, 1.0]]

[[graphs]]
edges = [[0, 1, 1.0], [1, 2, 1.0], [3, 4, 1.0], [4, 5, 1.0], [0, 3, 1.0], [1, 4, 1.0], [2, 5, 1.0]]

[signal]
kind = "generated"
dwell = { mode = "fixed", tau_d = 0.2 }

[init]
kind = "cap"
center = [1.0, 0.0, 0.0, 0.0]
radius = 0.75
flip_signs = true
"#;

/// Ten reduced attitudes (body z axis) on S^2 under an average-dwell signal.
pub const S2_POINTING: &str = r#"[scenario]
mode = "so3_incomplete_via_s2"
sphere_dim = 2
n_agents = 10
dt = 0.001
horizon = 40.0
seed = 2
body_axis = [0.0, 0.0, 1.0]

[shaping]
kind = "geodesic_quadratic"

[[graphs]]
edges = [[0, 1, 1.0], [1, 2, 1.0], [2, 3, 1.0], [3, 4, 1.0], [4, 5, 1.0], [5, 6, 1.0], [6, 7, 1.0], [7, 8, 1.0], [8, 9, 1.0], [0, 9, 1.0], [0, 5, 1.0], [2, 7, 1.0]]

[[graphs]]
edges = [[0, 1, 1.0], [0, 2, 1.0], [0, 3, 1.0], [0, 4, 1.0], [0, 5, 1.0], [0, 6, 1.0], [0, 7, 1.0], [0, 8, 1.0], [0, 9, 1.0], [1, 6, 1.0]]

[[graphs]]
edges = [[0, 2, 1.0], [2, 4, 1.0], [4, 6, 1.0], [6, 8, 1.0], [8, 0, 1.0], [1, 3, 1.0], [3, 5, 1.0], [5, 7, 1.0], [7, 9, 1.0], [9, 1, 1.0], [0, 1, 1.0], [4, 5, 1.0]]

[signal]
kind = "generated"
dwell = { mode = "average", n0 = 2.0, tau_a = 0.3 }

[init]
kind = "cap"
center = [0.0, 0.0, 1.0]
radius = 1.2
twist = true
"#;

/// Five points in the plane, embedded on S^2 with scale 10, on a fixed ring.
pub const RN_CONSENSUS: &str = r#"[scenario]
mode = "rn_consensus_via_sn"
sphere_dim = 2
n_agents = 5
dt = 0.001
horizon = 40.0
seed = 3
rho = 10.0

[shaping]
kind = "chordal"

[[graphs]]
edges = [[0, 1, 1.0], [1, 2, 1.0], [2, 3, 1.0], [3, 4, 1.0], [0, 4, 1.0]]

[signal]
kind = "explicit"
times = [0.0]
graphs = [0]

[init]
kind = "ball"
center = [0.0, 0.0]
radius = 5.0
"#;

pub fn preset_text(name: &str) -> Option<&'static str> {
    match name {
        "so3-complete" => Some(SO3_COMPLETE),
        "s2-pointing" => Some(S2_POINTING),
        "rn-consensus" => Some(RN_CONSENSUS),
        _ => None,
    }
}

pub fn preset(name: &str) -> Option<Result<ScenarioConfig, ConfigError>> {
    preset_text(name).map(ScenarioConfig::from_toml)
}
