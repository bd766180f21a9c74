use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::manifold::UnitVector;

/// The stacked state `(x_1, ..., x_N)` of all agents at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentStates {
    states: Vec<UnitVector>,
    time: f64,
}

impl AgentStates {
    pub fn new(states: Vec<UnitVector>, time: f64) -> Result<Self> {
        let Some(first) = states.first() else {
            return Err(Error::InvalidScenario("at least one agent is required".into()));
        };
        let dim = first.dim();
        if let Some(bad) = states.iter().find(|x| x.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim + 1,
                found: bad.dim() + 1,
            });
        }
        Ok(Self { states, time })
    }

    /// Rebuilds states from a flat row-major buffer of `n_agents * (dim + 1)` coordinates.
    pub(crate) fn from_flat(flat: &[f64], dim: usize, time: f64) -> Self {
        let states = flat
            .chunks_exact(dim + 1)
            .map(|c| UnitVector::from_raw(DVector::from_column_slice(c)))
            .collect();
        Self { states, time }
    }

    pub(crate) fn to_flat(&self) -> Vec<f64> {
        self.states
            .iter()
            .flat_map(|x| x.as_slice().iter().copied())
            .collect()
    }

    pub fn states(&self) -> &[UnitVector] {
        &self.states
    }

    pub fn get(&self, i: usize) -> &UnitVector {
        &self.states[i]
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Sphere dimension n shared by all agents.
    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn into_states(self) -> Vec<UnitVector> {
        self.states
    }
}
