//! Synchronization of unit vectors on S^n under switching network topologies.
//!
//! Agents evolve on the unit sphere under a distributed neighbor-coupling law
//! that is the negative gradient of an edge-sum potential. Full attitudes on
//! SO(3) are handled through unit quaternions on S^3, reduced attitudes
//! (pointing directions) directly on S^2, and Euclidean consensus through a
//! stereographic embedding into S^n. Runtime certificates check the
//! convergence hypotheses (connectivity, dwell time, hemisphere containment)
//! and the conclusion (synchronization) on every run.

pub mod error;
pub mod manifold;
pub mod network;
pub mod shaping;

pub use error::{Error, Result};
pub mod analysis;
pub mod dynamics;
pub mod sampling;

pub mod config;
pub mod io;
pub mod presets;
pub mod run;
