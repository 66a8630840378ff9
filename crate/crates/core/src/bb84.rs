//! BB84 in the equatorial bases `X = {|+⟩, |−⟩}` and `Y = {|+i⟩, |−i⟩}`,
//! plus the entropy and key-rate formulas used to judge it.
//!
//! Key bit 1 is encoded as `|+⟩`/`|+i⟩` and bit 0 as `|−⟩`/`|−i⟩`.

use std::f64::consts::{FRAC_PI_4, SQRT_2};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::cloner::{build_circuit, optimal_angles, BOB_QUBIT, EVE_QUBIT};
use crate::error::{Error, Result};
use crate::noise::{flip_readout, NoiseModel};
use crate::rng::{domain, stream};
use crate::statevector::{kets, Gate, Statevector};

/// Critical QBER `1/2 − √2/4` below which a key can be distilled.
pub const CRITICAL_QBER: f64 = 0.5 - SQRT_2 / 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KeyBit {
    pub value: bool,
    pub basis: Basis,
}

impl KeyBit {
    pub fn state(&self) -> Bb84State {
        Bb84State::encode(self.value, self.basis)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bb84State {
    Plus,
    Minus,
    PlusI,
    MinusI,
}

impl Bb84State {
    pub const ALL: [Bb84State; 4] = [
        Bb84State::Plus,
        Bb84State::Minus,
        Bb84State::PlusI,
        Bb84State::MinusI,
    ];

    pub fn encode(bit: bool, basis: Basis) -> Self {
        match (basis, bit) {
            (Basis::X, true) => Bb84State::Plus,
            (Basis::X, false) => Bb84State::Minus,
            (Basis::Y, true) => Bb84State::PlusI,
            (Basis::Y, false) => Bb84State::MinusI,
        }
    }

    pub fn basis(&self) -> Basis {
        match self {
            Bb84State::Plus | Bb84State::Minus => Basis::X,
            Bb84State::PlusI | Bb84State::MinusI => Basis::Y,
        }
    }

    pub fn bit(&self) -> bool {
        matches!(self, Bb84State::Plus | Bb84State::PlusI)
    }

    pub fn label(&self) -> &'static str {
        match self {
            Bb84State::Plus => "plus",
            Bb84State::Minus => "minus",
            Bb84State::PlusI => "plus_i",
            Bb84State::MinusI => "minus_i",
        }
    }

    /// Position in [`Bb84State::ALL`].
    pub fn index(&self) -> usize {
        *self as usize
    }

    pub fn ket(&self) -> [Complex64; 2] {
        match self {
            Bb84State::Plus => kets::equatorial(0.0),
            Bb84State::Minus => kets::equatorial(std::f64::consts::PI),
            Bb84State::PlusI => kets::equatorial(std::f64::consts::FRAC_PI_2),
            Bb84State::MinusI => kets::equatorial(-std::f64::consts::FRAC_PI_2),
        }
    }

    /// Gates taking `|0⟩` to this state: `H`, `ZH`, `SH`, `S†H`.
    pub fn preparation(&self) -> Vec<(Gate, &'static str)> {
        let mut gates = vec![(Gate::h(), "h")];
        match self {
            Bb84State::Plus => {}
            Bb84State::Minus => gates.push((Gate::z(), "z")),
            Bb84State::PlusI => gates.push((Gate::s(), "s")),
            Bb84State::MinusI => gates.push((Gate::sdg(), "sdg")),
        }
        gates
    }

    /// Inverse of [`Bb84State::preparation`]; afterwards outcome 0 means the
    /// qubit was found in this state.
    pub fn unpreparation(&self) -> Vec<(Gate, &'static str)> {
        self.preparation()
            .into_iter()
            .rev()
            .map(|(g, name)| {
                let dagger_name = match name {
                    "s" => "sdg",
                    "sdg" => "s",
                    other => other,
                };
                (g.dagger(), dagger_name)
            })
            .collect()
    }
}

impl Basis {
    /// Rotation after which outcome 0 means bit 1 in this basis.
    pub fn measurement(&self) -> Vec<(Gate, &'static str)> {
        Bb84State::encode(true, *self).unpreparation()
    }
}

impl fmt::Display for Bb84State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Bb84State {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "plus" | "+" => Ok(Bb84State::Plus),
            "minus" | "-" => Ok(Bb84State::Minus),
            "plus_i" | "+i" => Ok(Bb84State::PlusI),
            "minus_i" | "-i" => Ok(Bb84State::MinusI),
            other => Err(Error::InvalidArgument(format!(
                "unknown BB84 state {other:?}"
            ))),
        }
    }
}

/// Binary entropy in bits, with `h(0) = h(1) = 0`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain("p", p, "[0, 1]"));
    }
    let term = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    Ok(term(p) + term(1.0 - p))
}

/// Eve's error rate on the optimal cloning frontier, `1/2 − √(e_B(1 − e_B))`.
pub fn eve_qber_from_bob(e_b: f64) -> Result<f64> {
    check_qber("e_B", e_b)?;
    Ok((0.5 - (e_b * (1.0 - e_b)).sqrt()).max(0.0))
}

/// `1 − h(e)`.
pub fn mutual_info(e: f64) -> Result<f64> {
    check_qber("e", e)?;
    Ok(1.0 - binary_entropy(e)?)
}

fn check_qber(name: &'static str, e: f64) -> Result<()> {
    if !(0.0..=0.5).contains(&e) {
        return Err(Error::domain(name, e, "[0, 1/2]"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TheoryPoint {
    pub e_b: f64,
    pub e_e: f64,
    pub i_ab: f64,
    pub i_ae: f64,
}

/// Error rates and informations of the optimal cloner at angle `θ ∈ [0, π/4]`.
pub fn theory_curves(theta: f64) -> Result<TheoryPoint> {
    if !(0.0..=FRAC_PI_4).contains(&theta) {
        return Err(Error::domain("theta", theta, "[0, π/4]"));
    }
    let (s, c) = (2.0 * theta).sin_cos();
    let e_b = ((1.0 - s) / 2.0).clamp(0.0, 0.5);
    let e_e = ((1.0 - c) / 2.0).clamp(0.0, 0.5);
    Ok(TheoryPoint {
        e_b,
        e_e,
        i_ab: mutual_info(e_b)?,
        i_ae: mutual_info(e_e)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateReport {
    pub i_ab: f64,
    pub i_ae: f64,
    /// Taken equal to `i_ae`: the attack is symmetric between Alice and Bob.
    pub i_be: f64,
    /// `max(I_AB − I_AE, I_AB − I_BE)`, possibly negative.
    pub raw_rate: f64,
    /// `raw_rate` clamped at zero.
    pub rate: f64,
    pub insecure: bool,
}

/// Key rate when Eve sits on the optimal frontier for Bob's error `e_B`.
pub fn rate_report(e_b: f64) -> Result<RateReport> {
    let i_ab = mutual_info(e_b)?;
    let i_ae = mutual_info(eve_qber_from_bob(e_b)?)?;
    let i_be = i_ae;
    let raw_rate = (i_ab - i_ae).max(i_ab - i_be);
    Ok(RateReport {
        i_ab,
        i_ae,
        i_be,
        raw_rate,
        rate: raw_rate.max(0.0),
        insecure: raw_rate <= 0.0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolResult {
    pub rounds: usize,
    pub sifted_length: usize,
    /// Alice's basis for each sifted element.
    pub sifted_bases: Vec<Basis>,
    pub alice_bits: Vec<bool>,
    pub bob_bits: Vec<bool>,
    /// Eve's measurement of her clone in Alice's announced basis; `None`
    /// without an eavesdropper.
    pub eve_bits: Option<Vec<bool>>,
    pub e_b_hat: f64,
    pub e_e_hat: Option<f64>,
}

/// Rounds simulated per independent random stream.
pub const PROTOCOL_SHARD: usize = 2048;

struct Round {
    alice: KeyBit,
    bob_basis: Basis,
    bob_bit: bool,
    eve_bit: Option<bool>,
}

fn push_gates(c: &mut Circuit, target: usize, gates: Vec<(Gate, &'static str)>) -> Result<()> {
    for (g, name) in gates {
        c.gate(target, g, name)?;
    }
    Ok(())
}

fn simulate_round<R: Rng>(eve: Option<&Circuit>, noise: &NoiseModel, rng: &mut R) -> Result<Round> {
    let alice = KeyBit {
        value: rng.random_bool(0.5),
        basis: if rng.random_bool(0.5) {
            Basis::X
        } else {
            Basis::Y
        },
    };
    let bob_basis = if rng.random_bool(0.5) {
        Basis::X
    } else {
        Basis::Y
    };

    // Eve forwards q0 to Bob through her cloner. Without her, the qubit is
    // transferred from Alice's wire (q0) to Bob's (q1) by a CNOT swap.
    let (n, bob_qubit) = if eve.is_some() {
        (3, BOB_QUBIT)
    } else {
        (2, 1)
    };
    let mut c = Circuit::new(n)?;
    push_gates(&mut c, 0, alice.state().preparation())?;
    match eve {
        Some(cloner) => {
            c.extend(cloner)?;
        }
        None => {
            c.cnot(0, 1)?.cnot(1, 0)?.cnot(0, 1)?;
        }
    }
    push_gates(&mut c, bob_qubit, bob_basis.measurement())?;
    if eve.is_some() {
        push_gates(&mut c, EVE_QUBIT, alice.basis.measurement())?;
    }

    let mut state = Statevector::new(n)?;
    if noise.gates_are_ideal() {
        c.run(&mut state)?;
    } else {
        c.run_noisy(&mut state, noise, rng)?;
    }
    let outcome = state.sample_index(rng);
    let mut raw = vec![!state.bit(outcome, bob_qubit)];
    if eve.is_some() {
        raw.push(!state.bit(outcome, EVE_QUBIT));
    }
    let read = flip_readout(&raw, noise.p_readout, rng)?;
    Ok(Round {
        alice,
        bob_basis,
        bob_bit: read[0],
        eve_bit: read.get(1).copied(),
    })
}

fn error_rate(reference: &[bool], other: &[bool]) -> f64 {
    if reference.is_empty() {
        return 0.0;
    }
    let errors = reference.iter().zip(other).filter(|(a, b)| a != b).count();
    errors as f64 / reference.len() as f64
}

/// Runs prepare, measure and sift for `rounds` qubits, optionally with Eve
/// cloning each one at angle `eve_theta ∈ (0, π/4)` and measuring her clone
/// after the bases are announced.
pub fn run_protocol(
    rounds: usize,
    eve_theta: Option<f64>,
    noise: &NoiseModel,
    seed: u64,
) -> Result<ProtocolResult> {
    if rounds < 1 {
        return Err(Error::InvalidArgument("rounds must be at least 1".into()));
    }
    noise.validate()?;
    let cloner = eve_theta
        .map(|t| optimal_angles(t).map(|a| build_circuit(&a)))
        .transpose()?;

    let shards = rounds.div_ceil(PROTOCOL_SHARD);
    let per_shard: Vec<Vec<Round>> = (0..shards)
        .into_par_iter()
        .map(|shard| {
            let mut rng = stream(seed, &[domain::PROTOCOL, shard as u64]);
            let len = PROTOCOL_SHARD.min(rounds - shard * PROTOCOL_SHARD);
            (0..len)
                .map(|_| simulate_round(cloner.as_ref(), noise, &mut rng))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let mut result = ProtocolResult {
        rounds,
        sifted_length: 0,
        sifted_bases: Vec::new(),
        alice_bits: Vec::new(),
        bob_bits: Vec::new(),
        eve_bits: cloner.as_ref().map(|_| Vec::new()),
        e_b_hat: 0.0,
        e_e_hat: None,
    };
    for round in per_shard.into_iter().flatten() {
        if round.alice.basis != round.bob_basis {
            continue;
        }
        result.sifted_bases.push(round.alice.basis);
        result.alice_bits.push(round.alice.value);
        result.bob_bits.push(round.bob_bit);
        if let (Some(bits), Some(b)) = (result.eve_bits.as_mut(), round.eve_bit) {
            bits.push(b);
        }
    }
    result.sifted_length = result.alice_bits.len();
    result.e_b_hat = error_rate(&result.alice_bits, &result.bob_bits);
    result.e_e_hat = result
        .eve_bits
        .as_deref()
        .map(|eve| error_rate(&result.alice_bits, eve));
    Ok(result)
}
