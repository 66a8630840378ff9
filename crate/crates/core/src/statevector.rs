//! Dense pure-state simulator for registers of at most four qubits.
//!
//! Qubit 0 is the most significant bit of a basis-state index, so the ket
//! `|q0 q1 q2⟩` lives at index `4*q0 + 2*q1 + q2`.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

pub const MAX_QUBITS: usize = 4;

/// Tolerance for accepting a gate as unitary and a ket as normalized.
pub const UNITARY_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// A 2×2 complex matrix acting on one qubit, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gate(pub [[Complex64; 2]; 2]);

impl Gate {
    pub fn identity() -> Self {
        Gate([[ONE, ZERO], [ZERO, ONE]])
    }

    /// `R_y(angle) = [[cos(a/2), -sin(a/2)], [sin(a/2), cos(a/2)]]`.
    pub fn ry(angle: f64) -> Self {
        let (s, c) = (angle / 2.0).sin_cos();
        Gate([
            [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
            [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
        ])
    }

    pub fn h() -> Self {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Gate([[h, h], [h, -h]])
    }

    pub fn x() -> Self {
        Gate([[ZERO, ONE], [ONE, ZERO]])
    }

    pub fn y() -> Self {
        Gate([[ZERO, -I], [I, ZERO]])
    }

    pub fn z() -> Self {
        Gate([[ONE, ZERO], [ZERO, -ONE]])
    }

    pub fn s() -> Self {
        Gate([[ONE, ZERO], [ZERO, I]])
    }

    pub fn sdg() -> Self {
        Gate([[ONE, ZERO], [ZERO, -I]])
    }

    pub fn dagger(&self) -> Self {
        let m = &self.0;
        Gate([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn mul(&self, rhs: &Gate) -> Gate {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = [[ZERO; 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                *cell = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        Gate(out)
    }

    /// Largest element-wise deviation of `U†U` from the identity.
    pub fn unitarity_error(&self) -> f64 {
        let p = self.dagger().mul(self);
        let mut worst: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                let target = if r == c { ONE } else { ZERO };
                worst = worst.max((p.0[r][c] - target).norm());
            }
        }
        worst
    }

    pub fn apply_to(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1],
            m[1][0] * v[0] + m[1][1] * v[1],
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// `|0…0⟩` on `n_qubits` qubits.
    pub fn new(n_qubits: usize) -> Result<Self> {
        if !(1..=MAX_QUBITS).contains(&n_qubits) {
            return Err(Error::QubitCount(n_qubits));
        }
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[0] = ONE;
        Ok(Statevector { n_qubits, amps })
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if !len.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "amplitude count {len} is not a power of two"
            )));
        }
        let n_qubits = len.trailing_zeros() as usize;
        if !(1..=MAX_QUBITS).contains(&n_qubits) {
            return Err(Error::QubitCount(n_qubits));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > UNITARY_TOL {
            return Err(Error::Unnormalized(norm));
        }
        Ok(Statevector { n_qubits, amps })
    }

    /// Tensor product of single-qubit kets, qubit 0 first.
    pub fn product(factors: &[[Complex64; 2]]) -> Result<Self> {
        let mut amps = vec![ONE];
        for f in factors {
            amps = amps.iter().flat_map(|&a| [a * f[0], a * f[1]]).collect();
        }
        Self::from_amplitudes(amps)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_index(&self, index: usize) -> Result<()> {
        if index >= self.n_qubits {
            return Err(Error::QubitIndex {
                index,
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }

    fn mask(&self, qubit: usize) -> usize {
        1 << (self.n_qubits - 1 - qubit)
    }

    pub fn apply_1q(&mut self, gate: &Gate, target: usize) -> Result<()> {
        let err = gate.unitarity_error();
        if err > UNITARY_TOL {
            return Err(Error::NonUnitary(err));
        }
        self.check_index(target)?;
        self.apply_1q_unchecked(gate, target);
        Ok(())
    }

    /// Gate application without the unitarity check, for gates known to be
    /// unitary by construction (Paulis inside noise trajectories).
    pub(crate) fn apply_1q_unchecked(&mut self, gate: &Gate, target: usize) {
        let mask = self.mask(target);
        for i in 0..self.amps.len() {
            if i & mask == 0 {
                let j = i | mask;
                let [a, b] = gate.apply_to([self.amps[i], self.amps[j]]);
                self.amps[i] = a;
                self.amps[j] = b;
            }
        }
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        self.check_index(control)?;
        self.check_index(target)?;
        if control == target {
            return Err(Error::SameQubit(control));
        }
        let (cm, tm) = (self.mask(control), self.mask(target));
        for i in 0..self.amps.len() {
            if i & cm != 0 && i & tm == 0 {
                self.amps.swap(i, i | tm);
            }
        }
        Ok(())
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Draws one computational-basis outcome.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let cdf = cumulative(&self.probabilities());
        draw(&cdf, rng)
    }

    /// Multinomial sample of `shots` measurements of every qubit. Keys are
    /// bitstrings with qubit 0 first.
    pub fn sample<R: Rng + ?Sized>(
        &self,
        shots: u64,
        rng: &mut R,
    ) -> Result<BTreeMap<String, u64>> {
        if shots == 0 {
            return Err(Error::InvalidArgument("shots must be at least 1".into()));
        }
        let cdf = cumulative(&self.probabilities());
        let mut tally = vec![0u64; self.amps.len()];
        for _ in 0..shots {
            tally[draw(&cdf, rng)] += 1;
        }
        Ok(tally
            .into_iter()
            .enumerate()
            .filter(|&(_, n)| n > 0)
            .map(|(i, n)| (self.bitstring(i), n))
            .collect())
    }

    pub fn bitstring(&self, index: usize) -> String {
        format!("{:0width$b}", index, width = self.n_qubits)
    }

    /// Value of `qubit` in basis state `index`.
    pub fn bit(&self, index: usize, qubit: usize) -> bool {
        index & self.mask(qubit) != 0
    }

    /// Partial trace over every qubit except `keep`.
    pub fn reduced_density(&self, keep: usize) -> Result<DensityMatrix2> {
        self.check_index(keep)?;
        let mask = self.mask(keep);
        let mut m = [[ZERO; 2]; 2];
        for i in 0..self.amps.len() {
            if i & mask == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | mask]);
                m[0][0] += a0 * a0.conj();
                m[0][1] += a0 * a1.conj();
                m[1][0] += a1 * a0.conj();
                m[1][1] += a1 * a1.conj();
            }
        }
        Ok(DensityMatrix2(m))
    }
}

fn cumulative(probs: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    probs
        .iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect()
}

fn draw<R: Rng + ?Sized>(cdf: &[f64], rng: &mut R) -> usize {
    let total = *cdf.last().expect("non-empty register");
    let u: f64 = rng.random::<f64>() * total;
    cdf.iter().position(|&c| u < c).unwrap_or(cdf.len() - 1)
}

/// One-qubit density matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix2(pub [[Complex64; 2]; 2]);

impl DensityMatrix2 {
    pub fn pure(psi: [Complex64; 2]) -> Self {
        let mut m = [[ZERO; 2]; 2];
        for r in 0..2 {
            for c in 0..2 {
                m[r][c] = psi[r] * psi[c].conj();
            }
        }
        DensityMatrix2(m)
    }

    pub fn maximally_mixed() -> Self {
        let h = Complex64::new(0.5, 0.0);
        DensityMatrix2([[h, ZERO], [ZERO, h]])
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn hermiticity_error(&self) -> f64 {
        let m = &self.0;
        (m[0][1] - m[1][0].conj())
            .norm()
            .max(m[0][0].im.abs())
            .max(m[1][1].im.abs())
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let m = &self.0;
        let (a, d) = (m[0][0].re, m[1][1].re);
        let b = m[0][1].norm();
        let mid = (a + d) / 2.0;
        let rad = (((a - d) / 2.0).powi(2) + b * b).sqrt();
        [mid - rad, mid + rad]
    }

    /// `⟨ψ|ρ|ψ⟩` for a normalized ket.
    pub fn fidelity_pure(&self, psi: [Complex64; 2]) -> Result<f64> {
        let norm = psi[0].norm_sqr() + psi[1].norm_sqr();
        if (norm - 1.0).abs() > UNITARY_TOL {
            return Err(Error::Unnormalized(norm));
        }
        let m = &self.0;
        let mut acc = ZERO;
        for r in 0..2 {
            for c in 0..2 {
                acc += psi[r].conj() * m[r][c] * psi[c];
            }
        }
        Ok(acc.re)
    }

    /// Largest element-wise difference.
    pub fn max_abs_diff(&self, other: &DensityMatrix2) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                worst = worst.max((self.0[r][c] - other.0[r][c]).norm());
            }
        }
        worst
    }

    /// `w·self + (1-w)·other`.
    pub fn mix(&self, other: &DensityMatrix2, w: f64) -> DensityMatrix2 {
        DensityMatrix2(std::array::from_fn(|r| {
            std::array::from_fn(|c| self.0[r][c] * w + other.0[r][c] * (1.0 - w))
        }))
    }
}

/// Common single-qubit kets.
pub mod kets {
    use super::*;

    pub fn zero() -> [Complex64; 2] {
        [ONE, ZERO]
    }

    pub fn one() -> [Complex64; 2] {
        [ZERO, ONE]
    }

    /// `(|0⟩ + e^{iφ}|1⟩)/√2`.
    pub fn equatorial(phi: f64) -> [Complex64; 2] {
        [
            Complex64::new(FRAC_1_SQRT_2, 0.0),
            Complex64::from_polar(FRAC_1_SQRT_2, phi),
        ]
    }

    pub fn plus() -> [Complex64; 2] {
        equatorial(0.0)
    }
}
