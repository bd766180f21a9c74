use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("sphere dimension must be at least 1 (got ambient length {0})")]
    InvalidDimension(usize),

    #[error("vector is not unit norm (norm = {norm})")]
    NotUnit { norm: f64 },

    #[error("vector cannot be normalized (norm = {norm})")]
    Degenerate { norm: f64 },

    #[error("vector is not tangent at the base point (|<x, v>| = {residual})")]
    NotTangent { residual: f64 },

    #[error("matrix is not a rotation (|R^T R - I|_F = {orthogonality}, det = {det})")]
    NotRotation { orthogonality: f64, det: f64 },

    #[error("argument {value} outside [{lo}, {hi}]")]
    OutOfDomain { value: f64, lo: f64, hi: f64 },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid switching signal: {0}")]
    InvalidSignal(String),

    #[error("time {t} precedes signal start {start}")]
    BeforeSignalStart { t: f64, start: f64 },

    #[error("invalid interval: tau = {tau} > t = {t}")]
    InvalidInterval { tau: f64, t: f64 },

    #[error("invalid dwell specification: {0}")]
    InvalidDwellSpec(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("agents {i} and {j} are antipodal; coupling direction is undefined")]
    SingularConfiguration { i: usize, j: usize },

    #[error("states have zero Euclidean mean; no hemisphere pole can be formed")]
    DegenerateConfiguration,

    #[error("agent {agent} sits at the south pole; stereographic projection is singular")]
    SingularProjection { agent: usize },

    #[error("graph is disconnected")]
    Disconnected,

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("switching signal violates its dwell specification (margin {margin} at ({tau}, {t}))")]
    DwellViolation { margin: f64, tau: f64, t: f64 },
}
