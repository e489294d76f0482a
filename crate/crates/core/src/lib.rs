//! Quantum versus noncontextual performance in state-dependent cloning.
//!
//! * [`bounds`]: closed-form fidelities, noncontextual bounds and noise terms.
//! * [`quantum`]: density-matrix simulation of the depolarized experiment.
//! * [`ontic`]: discretized ontological models and their consistency checks.
//! * [`scan`]: parameter sweeps and violation-region root finding.
//! * [`cli`]: the command-line front end.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod ontic;
mod optimize;
pub mod quantum;
pub mod scan;

pub use error::{Error, Result};
