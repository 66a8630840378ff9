//! Stochastic gate and readout errors.
//!
//! Each faulty gate is followed, independently on every qubit it acts on, by a
//! uniformly random Pauli with the configured probability. Averaged over
//! trajectories this is the single-qubit depolarizing channel
//! `ρ ↦ (1 − 4p/3) ρ + (4p/3) I/2`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevector::{Gate, Statevector};

/// Quoted error rate for single-qubit gates on trapped-ion hardware.
pub const HARDWARE_P1: f64 = 0.0004;
/// Quoted error rate for two-qubit gates on trapped-ion hardware.
pub const HARDWARE_P2: f64 = 0.027;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Error probability per qubit after a single-qubit gate.
    pub p1: f64,
    /// Error probability per qubit after a two-qubit gate.
    pub p2: f64,
    /// Flip probability per measured bit.
    pub p_readout: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel {
            p1: HARDWARE_P1,
            p2: HARDWARE_P2,
            p_readout: 0.0,
        }
    }
}

impl NoiseModel {
    pub fn new(p1: f64, p2: f64, p_readout: f64) -> Result<Self> {
        check_probability("p1", p1)?;
        check_probability("p2", p2)?;
        check_probability("p_readout", p_readout)?;
        Ok(NoiseModel { p1, p2, p_readout })
    }

    pub fn noiseless() -> Self {
        NoiseModel {
            p1: 0.0,
            p2: 0.0,
            p_readout: 0.0,
        }
    }

    /// True when gates are exact (readout may still be noisy).
    pub fn gates_are_ideal(&self) -> bool {
        self.p1 == 0.0 && self.p2 == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        Self::new(self.p1, self.p2, self.p_readout).map(|_| ())
    }
}

fn check_probability(name: &'static str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(name, p, "[0, 1]"));
    }
    Ok(())
}

/// With probability `p` per target, applies X, Y or Z (uniformly) to it.
pub fn apply_gate_noise<R: Rng + ?Sized>(
    state: &mut Statevector,
    targets: &[usize],
    p: f64,
    rng: &mut R,
) -> Result<()> {
    check_probability("p", p)?;
    if p == 0.0 {
        return Ok(());
    }
    for &q in targets {
        if q >= state.n_qubits() {
            return Err(Error::QubitIndex {
                index: q,
                n_qubits: state.n_qubits(),
            });
        }
        if rng.random_bool(p) {
            let pauli = match rng.random_range(0..3) {
                0 => Gate::x(),
                1 => Gate::y(),
                _ => Gate::z(),
            };
            state.apply_1q_unchecked(&pauli, q);
        }
    }
    Ok(())
}

/// Flips each bit independently with probability `p_readout`.
pub fn flip_readout<R: Rng + ?Sized>(
    bits: &[bool],
    p_readout: f64,
    rng: &mut R,
) -> Result<Vec<bool>> {
    check_probability("p_readout", p_readout)?;
    if p_readout == 0.0 {
        return Ok(bits.to_vec());
    }
    Ok(bits
        .iter()
        .map(|&b| b ^ rng.random_bool(p_readout))
        .collect())
}
