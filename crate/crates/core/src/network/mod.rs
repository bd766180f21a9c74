//! Communication graphs, switching signals and dwell-time bookkeeping.

mod dwell;
mod graph;
mod signal;

pub use dwell::{generate_switching_signal, validate_dwell, DwellReport, DwellTimeSpec};
pub use graph::{is_connected, Edge, Graph};
pub use signal::SwitchingSignal;
