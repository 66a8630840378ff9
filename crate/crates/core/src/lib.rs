//! Desk-scale simulation of an individual BB84 eavesdropping attack built on
//! asymmetric phase-covariant cloning.
//!
//! The crate is layered bottom-up:
//!
//! * [`statevector`] and [`circuit`]: a dense pure-state simulator for a few qubits.
//! * [`cloner`]: the three-qubit cloning circuit, its coefficient algebra and
//!   theoretical fidelity curves.
//! * [`optimizer`]: closed-form Lagrange solution for optimal asymmetric clones.
//! * [`bb84`]: protocol engine plus entropy, mutual-information and key-rate formulas.
//! * [`noise`]: stochastic Pauli trajectories emulating gate and readout errors.
//! * [`experiment`]: fidelity sweeps over random cloning angles, persisted as CSV.
//! * [`stats`]: quadratic fits, crossover search, Monte-Carlo and bootstrap intervals.

pub mod bb84;
pub mod circuit;
pub mod cloner;
pub mod error;
pub mod experiment;
pub mod noise;
pub mod optimizer;
pub mod rng;
pub mod statevector;
pub mod stats;

pub use error::{Error, Result};
