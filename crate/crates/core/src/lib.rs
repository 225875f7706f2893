//! Contextuality tests on a single qudit: exclusivity graphs for the `N ≥ 5`
//! family, beam-splitter realizations of the measurements, the precision
//! threshold of the noise-robust inequality, decoherence sweeps, and a
//! path/time-delay photonic simulator.

pub mod cli;
pub mod decoherence;
pub mod error;
pub mod exact;
pub mod exec;
pub mod graph;
pub mod interferometer;
pub mod linalg;
pub mod ofnc;
pub mod photonic;
pub mod states;

pub use error::{Error, Result};
pub use exec::Execution;
