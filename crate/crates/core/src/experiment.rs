//! Fidelity sweeps: for each BB84 state, draw cloning angles uniformly, run
//! the cloner for a number of shots and record how often each clone is found
//! in the prepared state.

use std::f64::consts::FRAC_PI_4;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bb84::Bb84State;
use crate::circuit::Circuit;
use crate::cloner::{build_circuit, CloneAngles, BOB_QUBIT, EVE_QUBIT};
use crate::error::{Error, Result};
use crate::noise::{flip_readout, NoiseModel};
use crate::rng::{domain, stream};
use crate::statevector::Statevector;

pub const CSV_HEADER: [&str; 5] = ["state", "theta", "shots", "fid_a", "fid_b"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub states: Vec<Bb84State>,
    pub n_angles: usize,
    pub shots: u64,
    pub theta_range: (f64, f64),
    pub noise: NoiseModel,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            states: Bb84State::ALL.to_vec(),
            n_angles: 100,
            shots: 100,
            theta_range: (0.0, FRAC_PI_4),
            noise: NoiseModel::default(),
            seed: 1,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.states.is_empty() {
            return Err(Error::InvalidArgument("no states selected".into()));
        }
        if self.n_angles < 3 {
            return Err(Error::InvalidArgument(format!(
                "n_angles must be at least 3 for a quadratic fit, got {}",
                self.n_angles
            )));
        }
        if self.shots < 1 {
            return Err(Error::InvalidArgument("shots must be at least 1".into()));
        }
        let (lo, hi) = self.theta_range;
        if !(0.0 <= lo && lo <= hi && hi <= FRAC_PI_4) {
            return Err(Error::InvalidArgument(format!(
                "theta_range ({lo}, {hi}) not within [0, π/4]"
            )));
        }
        self.noise.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub state: Bb84State,
    pub theta: f64,
    pub shots: u64,
    /// Fraction of shots in which Bob's clone matched the prepared state.
    pub fid_a: f64,
    /// Same for Eve's clone.
    pub fid_b: f64,
}

/// Preparation, cloner at `(π/4, θ, θ)`, then both clones rotated back so
/// that outcome 0 on a clone means "found in the prepared state".
pub fn fidelity_circuit(state: Bb84State, theta: f64) -> Circuit {
    let mut c = Circuit::new(3).expect("three qubits");
    for (g, name) in state.preparation() {
        c.gate(0, g, name).expect("valid qubit");
    }
    c.extend(&build_circuit(&CloneAngles::new(FRAC_PI_4, theta, theta)))
        .expect("same register");
    for q in [BOB_QUBIT, EVE_QUBIT] {
        for (g, name) in state.unpreparation() {
            c.gate(q, g, name).expect("valid qubit");
        }
    }
    c
}

/// Counts shots whose Bob and Eve clones matched the prepared state.
pub fn measure_clones<R: Rng>(
    state: Bb84State,
    theta: f64,
    shots: u64,
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<(u64, u64)> {
    let circuit = fidelity_circuit(state, theta);
    let ideal = if noise.gates_are_ideal() {
        let mut s = Statevector::new(3)?;
        circuit.run(&mut s)?;
        Some(s)
    } else {
        None
    };
    let (mut hits_a, mut hits_b) = (0, 0);
    for _ in 0..shots {
        let (a, b) = match &ideal {
            Some(s) => {
                let idx = s.sample_index(rng);
                (s.bit(idx, BOB_QUBIT), s.bit(idx, EVE_QUBIT))
            }
            None => {
                let mut s = Statevector::new(3)?;
                circuit.run_noisy(&mut s, noise, rng)?;
                let idx = s.sample_index(rng);
                (s.bit(idx, BOB_QUBIT), s.bit(idx, EVE_QUBIT))
            }
        };
        let read = flip_readout(&[a, b], noise.p_readout, rng)?;
        hits_a += u64::from(!read[0]);
        hits_b += u64::from(!read[1]);
    }
    Ok((hits_a, hits_b))
}

/// Runs the sweep. Point `k` of state `s` uses its own stream derived from
/// `(seed, s, k)`, so results do not depend on scheduling.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<ExperimentRecord>> {
    cfg.validate()?;
    let (lo, hi) = cfg.theta_range;
    let jobs: Vec<(Bb84State, usize)> = cfg
        .states
        .iter()
        .flat_map(|&s| (0..cfg.n_angles).map(move |k| (s, k)))
        .collect();
    jobs.into_par_iter()
        .map(|(state, k)| {
            let mut rng = stream(cfg.seed, &[domain::SWEEP, state.index() as u64, k as u64]);
            let theta = rng.random_range(lo..=hi);
            let (a, b) = measure_clones(state, theta, cfg.shots, &cfg.noise, &mut rng)?;
            Ok(ExperimentRecord {
                state,
                theta,
                shots: cfg.shots,
                fid_a: a as f64 / cfg.shots as f64,
                fid_b: b as f64 / cfg.shots as f64,
            })
        })
        .collect()
}

pub fn write_records<W: Write>(writer: W, records: &[ExperimentRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            r.state.label().to_string(),
            format!("{:.16e}", r.theta),
            r.shots.to_string(),
            r.fid_a.to_string(),
            r.fid_b.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records<R: Read>(reader: R) -> Result<Vec<ExperimentRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.iter().map(str::trim).ne(CSV_HEADER) {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header {}", CSV_HEADER.join(",")),
        });
    }
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let field = |i: usize| row.get(i).map(str::trim).unwrap_or("");
        let bad = |name: &str, value: &str| Error::Parse {
            line,
            message: format!("invalid {name} {value:?}"),
        };
        let state: Bb84State = field(0).parse().map_err(|_| bad("state", field(0)))?;
        let theta: f64 = field(1).parse().map_err(|_| bad("theta", field(1)))?;
        let shots: u64 = field(2).parse().map_err(|_| bad("shots", field(2)))?;
        let fid_a: f64 = field(3).parse().map_err(|_| bad("fid_a", field(3)))?;
        let fid_b: f64 = field(4).parse().map_err(|_| bad("fid_b", field(4)))?;
        if !theta.is_finite() || !(0.0..=1.0).contains(&fid_a) || !(0.0..=1.0).contains(&fid_b) {
            return Err(Error::Parse {
                line,
                message: "value out of range".into(),
            });
        }
        out.push(ExperimentRecord {
            state,
            theta,
            shots,
            fid_a,
            fid_b,
        });
    }
    Ok(out)
}

pub fn write_csv(path: impl AsRef<Path>, records: &[ExperimentRecord]) -> Result<()> {
    write_records(File::create(path)?, records)
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<ExperimentRecord>> {
    read_records(File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn record(theta: f64) -> ExperimentRecord {
        ExperimentRecord {
            state: Bb84State::MinusI,
            theta,
            shots: 100,
            fid_a: 0.83,
            fid_b: 0.21,
        }
    }

    #[test]
    fn config_validation() {
        assert!(SweepConfig::default().validate().is_ok());
        let bad = SweepConfig {
            n_angles: 2,
            ..Default::default()
        };
        assert!(run_sweep(&bad).is_err());
        let bad = SweepConfig {
            shots: 0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = SweepConfig {
            theta_range: (0.0, 1.0),
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn empty_list_writes_header_only() {
        let mut buf = Vec::new();
        write_records(&mut buf, &[]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "state,theta,shots,fid_a,fid_b\n"
        );
    }

    #[test]
    fn line_count() {
        let records: Vec<_> = (0..400).map(|k| record(k as f64 / 1000.0)).collect();
        let mut buf = Vec::new();
        write_records(&mut buf, &records).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap().lines().count(), 401);
        assert_eq!(read_records(buf.as_slice()).unwrap(), records);
    }

    #[test]
    fn corrupt_field_names_line() {
        let text = "state,theta,shots,fid_a,fid_b\nplus,0.1,100,0.5,0.5\nminus,abc,100,0.5,0.5\n";
        match read_records(text.as_bytes()) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 3);
                assert!(message.contains("theta"));
            }
            other => panic!("unexpected {other:?}"),
        }
        let text = "state,theta\nplus,0.1\n";
        assert!(matches!(
            read_records(text.as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn fidelities_are_multiples_of_inverse_shots() {
        let cfg = SweepConfig {
            n_angles: 5,
            shots: 40,
            ..Default::default()
        };
        for r in run_sweep(&cfg).unwrap() {
            assert!(((r.fid_a * 40.0) - (r.fid_a * 40.0).round()).abs() < 1e-9);
            assert!(((r.fid_b * 40.0) - (r.fid_b * 40.0).round()).abs() < 1e-9);
        }
    }

    proptest! {
        #[test]
        fn csv_round_trip(theta in 0.0f64..FRAC_PI_4, a in 0u64..=100, b in 0u64..=100, s in 0usize..4) {
            let r = ExperimentRecord {
                state: Bb84State::ALL[s],
                theta,
                shots: 100,
                fid_a: a as f64 / 100.0,
                fid_b: b as f64 / 100.0,
            };
            let mut buf = Vec::new();
            write_records(&mut buf, std::slice::from_ref(&r)).unwrap();
            prop_assert_eq!(read_records(buf.as_slice()).unwrap(), vec![r]);
        }
    }
}
