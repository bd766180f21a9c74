//! The closed-loop system: coupling law, time stepping and the SO(3) castings.

mod casting;
mod law;
mod simulate;
mod state;

pub use casting::{lift_so3_complete, project_so3_incomplete, quaternion_sign_align, SignAlignment};
pub use law::{control_law, step, ANTIPODAL_TOL};
pub use simulate::{simulate, Mode, Sample, Scenario, Trace, TraceEvent, MONOTONICITY_TOL};
pub use state::AgentStates;
