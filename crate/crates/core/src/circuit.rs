//! Ordered gate lists over a [`Statevector`].

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::noise::{apply_gate_noise, NoiseModel};
use crate::statevector::{Gate, Statevector, MAX_QUBITS};

#[derive(Debug, Clone, PartialEq)]
pub enum CircuitOp {
    Ry {
        target: usize,
        angle: f64,
    },
    Gate1 {
        target: usize,
        gate: Gate,
        name: &'static str,
    },
    Cnot {
        control: usize,
        target: usize,
    },
}

impl CircuitOp {
    /// Qubits the operation acts on; gate noise lands on each of them.
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            CircuitOp::Ry { target, .. } | CircuitOp::Gate1 { target, .. } => vec![target],
            CircuitOp::Cnot { control, target } => vec![control, target],
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self, CircuitOp::Cnot { .. })
    }

    pub fn apply(&self, state: &mut Statevector) -> Result<()> {
        match *self {
            CircuitOp::Ry { target, angle } => state.apply_1q(&Gate::ry(angle), target),
            CircuitOp::Gate1 {
                target, ref gate, ..
            } => state.apply_1q(gate, target),
            CircuitOp::Cnot { control, target } => state.apply_cnot(control, target),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    ops: Vec<CircuitOp>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if !(1..=MAX_QUBITS).contains(&n_qubits) {
            return Err(Error::QubitCount(n_qubits));
        }
        Ok(Circuit {
            n_qubits,
            ops: Vec::new(),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn ops(&self) -> &[CircuitOp] {
        &self.ops
    }

    pub fn push(&mut self, op: CircuitOp) -> Result<&mut Self> {
        for q in op.qubits() {
            if q >= self.n_qubits {
                return Err(Error::QubitIndex {
                    index: q,
                    n_qubits: self.n_qubits,
                });
            }
        }
        if let CircuitOp::Cnot { control, target } = op {
            if control == target {
                return Err(Error::SameQubit(control));
            }
        }
        self.ops.push(op);
        Ok(self)
    }

    pub fn ry(&mut self, target: usize, angle: f64) -> Result<&mut Self> {
        self.push(CircuitOp::Ry { target, angle })
    }

    pub fn gate(&mut self, target: usize, gate: Gate, name: &'static str) -> Result<&mut Self> {
        self.push(CircuitOp::Gate1 { target, gate, name })
    }

    pub fn cnot(&mut self, control: usize, target: usize) -> Result<&mut Self> {
        self.push(CircuitOp::Cnot { control, target })
    }

    pub fn extend(&mut self, other: &Circuit) -> Result<&mut Self> {
        for op in &other.ops {
            self.push(op.clone())?;
        }
        Ok(self)
    }

    fn check_state(&self, state: &Statevector) -> Result<()> {
        if state.n_qubits() != self.n_qubits {
            return Err(Error::InvalidArgument(format!(
                "circuit on {} qubits applied to {}-qubit state",
                self.n_qubits,
                state.n_qubits()
            )));
        }
        Ok(())
    }

    pub fn run(&self, state: &mut Statevector) -> Result<()> {
        self.check_state(state)?;
        for op in &self.ops {
            op.apply(state)?;
        }
        Ok(())
    }

    /// One noise trajectory: after every gate, each qubit it touched suffers
    /// a random Pauli with the model's one- or two-qubit error probability.
    pub fn run_noisy<R: Rng + ?Sized>(
        &self,
        state: &mut Statevector,
        noise: &NoiseModel,
        rng: &mut R,
    ) -> Result<()> {
        self.check_state(state)?;
        for op in &self.ops {
            op.apply(state)?;
            let p = if op.is_two_qubit() {
                noise.p2
            } else {
                noise.p1
            };
            apply_gate_noise(state, &op.qubits(), p, rng)?;
        }
        Ok(())
    }

    /// Full `2^n × 2^n` matrix, column `j` being the image of basis state `j`.
    pub fn unitary(&self) -> Result<Vec<Vec<Complex64>>> {
        let dim = 1usize << self.n_qubits;
        let mut cols = Vec::with_capacity(dim);
        for j in 0..dim {
            let mut amps = vec![Complex64::new(0.0, 0.0); dim];
            amps[j] = Complex64::new(1.0, 0.0);
            let mut s = Statevector::from_amplitudes(amps)?;
            self.run(&mut s)?;
            cols.push(s.amplitudes().to_vec());
        }
        Ok((0..dim)
            .map(|r| (0..dim).map(|c| cols[c][r]).collect())
            .collect())
    }
}
