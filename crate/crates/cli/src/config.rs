//! Settings are layered: built-in defaults, then the seed environment
//! variable, then the `--config` file, then command-line flags.

use std::path::Path;

use eavesdrop_core::bb84::Bb84State;
use eavesdrop_core::experiment::SweepConfig;
use eavesdrop_core::noise::NoiseModel;
use eavesdrop_core::stats::DEFAULT_REPS;
use serde::{Deserialize, Serialize};

use crate::angle::parse_angle;
use crate::args::NoiseArgs;
use crate::error::{CliError, CliResult};

pub const SEED_ENV: &str = "EAVESDROP_SEED";
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_ROUNDS: usize = 10_000;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    #[serde(default)]
    pub noise: NoiseSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub analyze: AnalyzeSection,
    #[serde(default)]
    pub protocol: ProtocolSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    pub p1: Option<f64>,
    pub p2: Option<f64>,
    pub readout: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub states: Option<Vec<String>>,
    pub angles: Option<usize>,
    pub shots: Option<u64>,
    pub theta_min: Option<AngleValue>,
    pub theta_max: Option<AngleValue>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeSection {
    pub reps: Option<usize>,
    pub unpaired: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolSection {
    pub rounds: Option<usize>,
    pub eve_theta: Option<AngleValue>,
}

/// An angle in a config file, either a number or a literal like `"pi/8"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum AngleValue {
    Radians(f64),
    Literal(String),
}

impl AngleValue {
    fn radians(&self) -> CliResult<f64> {
        match self {
            AngleValue::Radians(x) => Ok(*x),
            AngleValue::Literal(s) => parse_angle(s).map_err(CliError::Usage),
        }
    }
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Data(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::Data(format!("invalid config {}: {e}", path.display())))
    }

    pub fn seed(&self, flag: Option<u64>) -> CliResult<u64> {
        if let Some(s) = flag.or(self.seed) {
            return Ok(s);
        }
        match std::env::var(SEED_ENV) {
            Ok(v) => v.trim().parse().map_err(|_| {
                CliError::Usage(format!("{SEED_ENV}={v:?} is not an unsigned integer"))
            }),
            Err(_) => Ok(DEFAULT_SEED),
        }
    }

    pub fn noise(&self, flags: &NoiseArgs) -> CliResult<NoiseModel> {
        let base = NoiseModel::default();
        let model = NoiseModel::new(
            flags.noise_p1.or(self.noise.p1).unwrap_or(base.p1),
            flags.noise_p2.or(self.noise.p2).unwrap_or(base.p2),
            flags
                .noise_readout
                .or(self.noise.readout)
                .unwrap_or(base.p_readout),
        )?;
        Ok(model)
    }

    pub fn sweep(&self, args: &crate::args::SweepArgs) -> CliResult<SweepConfig> {
        let base = SweepConfig::default();
        let states = match args.states.as_ref().or(self.sweep.states.as_ref()) {
            Some(labels) => labels
                .iter()
                .map(|l| {
                    l.parse::<Bb84State>()
                        .map_err(|_| CliError::Usage(format!("unknown state {l:?}")))
                })
                .collect::<CliResult<Vec<_>>>()?,
            None => base.states,
        };
        let angle =
            |flag: Option<f64>, file: &Option<AngleValue>, default: f64| -> CliResult<f64> {
                match (flag, file) {
                    (Some(x), _) => Ok(x),
                    (None, Some(v)) => v.radians(),
                    (None, None) => Ok(default),
                }
            };
        let cfg = SweepConfig {
            states,
            n_angles: args.angles.or(self.sweep.angles).unwrap_or(base.n_angles),
            shots: args.shots.or(self.sweep.shots).unwrap_or(base.shots),
            theta_range: (
                angle(args.theta_min, &self.sweep.theta_min, base.theta_range.0)?,
                angle(args.theta_max, &self.sweep.theta_max, base.theta_range.1)?,
            ),
            noise: self.noise(&args.noise)?,
            seed: self.seed(args.seed)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn analyze(&self, args: &crate::args::AnalyzeArgs) -> CliResult<AnalyzeConfig> {
        Ok(AnalyzeConfig {
            reps: args.reps.or(self.analyze.reps).unwrap_or(DEFAULT_REPS),
            paired: !(args.unpaired || self.analyze.unpaired.unwrap_or(false)),
            seed: self.seed(args.seed)?,
        })
    }

    pub fn protocol(&self, args: &crate::args::ProtocolArgs) -> CliResult<ProtocolConfig> {
        let eve_theta = match (args.eve_theta, &self.protocol.eve_theta) {
            (Some(x), _) => Some(x),
            (None, Some(v)) => Some(v.radians()?),
            (None, None) => None,
        };
        Ok(ProtocolConfig {
            rounds: args
                .rounds
                .or(self.protocol.rounds)
                .unwrap_or(DEFAULT_ROUNDS),
            eve_theta,
            noise: self.noise(&args.noise)?,
            seed: self.seed(args.seed)?,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalyzeConfig {
    pub reps: usize,
    pub paired: bool,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProtocolConfig {
    pub rounds: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eve_theta: Option<f64>,
    pub noise: NoiseModel,
    pub seed: u64,
}
