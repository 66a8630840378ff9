//! Asymmetric phase-covariant cloning.
//!
//! The machine acts on input `A`, blank clone `B` and ancilla `X` as
//!
//! ```text
//! |i⟩|0⟩|0⟩ ↦ μ|i i i⟩ + ν|i j j⟩ + ξ|j i j⟩,   j = 1 − i
//! ```
//!
//! In the circuit realization qubit 0 carries the `A` output (forwarded to
//! Bob), qubit 1 the `B` output (kept by Eve) and qubit 2 the ancilla. On
//! equatorial inputs the clones have the form `η ρ_ideal + (1 − η) I/2` with
//! `η_A = 2μν` and `η_B = 2μξ`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use num_complex::Complex64;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::statevector::{kets, DensityMatrix2, Statevector};

/// Qubit holding the clone forwarded to Bob.
pub const BOB_QUBIT: usize = 0;
/// Qubit holding the clone Eve keeps.
pub const EVE_QUBIT: usize = 1;
pub const ANCILLA_QUBIT: usize = 2;

/// Residual above which angles are rejected as not phase covariant.
pub const ZERO_CONDITION_TOL: f64 = 1e-8;

/// Rotation angles of the cloning circuit; gates rotate by twice each.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloneAngles {
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
}

impl CloneAngles {
    pub fn new(theta1: f64, theta2: f64, theta3: f64) -> Self {
        CloneAngles {
            theta1,
            theta2,
            theta3,
        }
    }

    /// `cos θ1 cos θ2 sin θ3 − sin θ1 sin θ2 cos θ3`, the amplitude that must
    /// vanish for the circuit to realize the machine above.
    pub fn zero_condition_residual(&self) -> f64 {
        let (s1, c1) = self.theta1.sin_cos();
        let (s2, c2) = self.theta2.sin_cos();
        let (s3, c3) = self.theta3.sin_cos();
        c1 * c2 * s3 - s1 * s2 * c3
    }
}

/// Optimal angles `(π/4, θ, θ)` for `θ ∈ (0, π/4)`.
pub fn optimal_angles(theta: f64) -> Result<CloneAngles> {
    check_open_domain(theta)?;
    Ok(CloneAngles::new(FRAC_PI_4, theta, theta))
}

fn check_open_domain(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta < FRAC_PI_4) {
        return Err(Error::domain("theta", theta, "(0, π/4)"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloneCoefficients {
    pub mu: f64,
    pub nu: f64,
    pub xi: f64,
}

impl CloneCoefficients {
    /// The symmetric universal machine: `μ² = 2/3`, `ν = ξ`, `ν² = 1/6`.
    pub fn symmetric_universal() -> Self {
        CloneCoefficients {
            mu: (2.0f64 / 3.0).sqrt(),
            nu: (1.0f64 / 6.0).sqrt(),
            xi: (1.0f64 / 6.0).sqrt(),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.mu * self.mu + self.nu * self.nu + self.xi * self.xi
    }

    pub fn eta_a(&self) -> f64 {
        2.0 * self.mu * self.nu
    }

    pub fn eta_b(&self) -> f64 {
        2.0 * self.mu * self.xi
    }

    /// Applies the machine to `|ψ⟩_A |0⟩_B |0⟩_X` directly by linearity.
    pub fn apply(&self, psi: [Complex64; 2]) -> Result<Statevector> {
        let mut amps = vec![Complex64::new(0.0, 0.0); 8];
        for (i, &alpha) in psi.iter().enumerate() {
            let j = 1 - i;
            amps[basis(i, i, i)] += alpha * self.mu;
            amps[basis(i, j, j)] += alpha * self.nu;
            amps[basis(j, i, j)] += alpha * self.xi;
        }
        Statevector::from_amplitudes(amps)
    }
}

fn basis(a: usize, b: usize, x: usize) -> usize {
    (a << 2) | (b << 1) | x
}

/// Machine coefficients realized by the circuit at `angles`.
pub fn coefficients(angles: &CloneAngles) -> Result<CloneCoefficients> {
    let residual = angles.zero_condition_residual();
    if residual.abs() > ZERO_CONDITION_TOL {
        return Err(Error::ZeroCondition(residual));
    }
    let (s1, c1) = angles.theta1.sin_cos();
    let (s2, c2) = angles.theta2.sin_cos();
    let (s3, c3) = angles.theta3.sin_cos();
    Ok(CloneCoefficients {
        mu: c1 * c2 * c3 + s1 * s2 * s3,
        nu: c1 * s2 * c3 + s1 * c2 * s3,
        xi: s1 * c2 * c3 - c1 * s2 * s3,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShrinkingFactors {
    pub eta_a: f64,
    pub eta_b: f64,
}

/// `(sin 2θ, cos 2θ)` for the optimal cloner.
pub fn shrinking_factors(theta: f64) -> Result<ShrinkingFactors> {
    check_open_domain(theta)?;
    let (s, c) = (2.0 * theta).sin_cos();
    Ok(ShrinkingFactors { eta_a: s, eta_b: c })
}

/// `F_A = (1 + sin 2θ)/2`, `F_B = (1 + cos 2θ)/2`.
pub fn theoretical_fidelities(theta: f64) -> Result<(f64, f64)> {
    check_open_domain(theta)?;
    Ok(fidelity_curves(theta))
}

/// Theory curves on the closed interval, where no circuit is implied.
pub(crate) fn fidelity_curves(theta: f64) -> (f64, f64) {
    let (s, c) = (2.0 * theta).sin_cos();
    ((1.0 + s) / 2.0, (1.0 + c) / 2.0)
}

/// The 3-qubit cloning circuit acting on `|ψ⟩ ⊗ |0⟩ ⊗ |0⟩`.
///
/// The first five gates prepare the `B`/`X` resource state; the four CNOTs
/// then entangle it with the input.
pub fn build_circuit(angles: &CloneAngles) -> Circuit {
    let mut c = Circuit::new(3).expect("three qubits");
    c.ry(1, 2.0 * angles.theta1)
        .and_then(|c| c.cnot(1, 2))
        .and_then(|c| c.ry(2, 2.0 * angles.theta2))
        .and_then(|c| c.cnot(2, 1))
        .and_then(|c| c.ry(1, 2.0 * angles.theta3))
        .and_then(|c| c.cnot(0, 1))
        .and_then(|c| c.cnot(0, 2))
        .and_then(|c| c.cnot(1, 0))
        .and_then(|c| c.cnot(2, 0))
        .expect("static gate list is valid");
    c
}

/// Runs the optimal circuit on the equatorial input `(|0⟩ + e^{iφ}|1⟩)/√2`
/// and returns `(ρ_Bob, ρ_Eve)`.
pub fn clone(phi: f64, theta: f64) -> Result<(DensityMatrix2, DensityMatrix2)> {
    if !(0.0..2.0 * std::f64::consts::PI).contains(&phi) {
        return Err(Error::domain("phi", phi, "[0, 2π)"));
    }
    let angles = optimal_angles(theta)?;
    clone_state(kets::equatorial(phi), &angles)
}

/// Runs the circuit at arbitrary `angles` on an arbitrary input ket.
pub fn clone_state(
    psi: [Complex64; 2],
    angles: &CloneAngles,
) -> Result<(DensityMatrix2, DensityMatrix2)> {
    let mut state = Statevector::product(&[psi, kets::zero(), kets::zero()])?;
    build_circuit(angles).run(&mut state)?;
    Ok((
        state.reduced_density(BOB_QUBIT)?,
        state.reduced_density(EVE_QUBIT)?,
    ))
}

/// Expected clone `η|ψ⟩⟨ψ| + (1 − η) I/2`.
pub fn clone_form(psi: [Complex64; 2], eta: f64) -> DensityMatrix2 {
    DensityMatrix2::pure(psi).mix(&DensityMatrix2::maximally_mixed(), eta)
}

/// `μ = 1/√2` for every optimal angle choice.
pub const OPTIMAL_MU: f64 = FRAC_1_SQRT_2;
