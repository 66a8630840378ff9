//! JSON analysis report and plot data for a sweep CSV.

use std::f64::consts::FRAC_PI_4;
use std::fmt::Write as _;

use eavesdrop_core::bb84::theory_curves;
use eavesdrop_core::bb84::Bb84State;
use eavesdrop_core::experiment::ExperimentRecord;
use eavesdrop_core::rng::derive_seed;
use eavesdrop_core::stats::{
    aggregate_cumulative, bootstrap_ci, fit_quadratic, intersect, monte_carlo_ci,
    CrossoverInterval, IntersectionEstimate, IntervalEstimate, QuadraticFit, CROSSOVER_DOMAIN,
};
use eavesdrop_core::Error;
use serde::Serialize;
use serde_json::Value;

use crate::config::AnalyzeConfig;

pub const SCHEMA_VERSION: u32 = 1;
pub const PLOT_POINTS: usize = 101;
pub const PLOT_HEADER: &str = "state,theta,fit_a,fit_b,theory_a,theory_b";

#[derive(Debug, Serialize)]
pub struct ErrorObject {
    pub kind: &'static str,
    pub message: String,
}

impl From<&Error> for ErrorObject {
    fn from(e: &Error) -> Self {
        let kind = match e {
            Error::RankDeficient => "rank_deficient",
            Error::NoCrossover(_) => "no_crossover",
            Error::TooManyFailures { .. } => "too_many_failures",
            Error::InvalidArgument(_) | Error::Domain { .. } => "invalid_argument",
            _ => "error",
        };
        ErrorObject {
            kind,
            message: e.to_string(),
        }
    }
}

/// A result or a structured error, serialized as the value itself or as
/// `{"error": {...}}`.
#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum Outcome<T> {
    Ok(T),
    Err { error: ErrorObject },
}

impl<T> Outcome<T> {
    pub(crate) fn from_result<U>(r: &Result<U, Error>, f: impl FnOnce(&U) -> T) -> Self {
        match r {
            Ok(v) => Outcome::Ok(f(v)),
            Err(e) => Outcome::Err { error: e.into() },
        }
    }

    fn failure(kind: &'static str, message: impl Into<String>) -> Self {
        Outcome::Err {
            error: ErrorObject {
                kind,
                message: message.into(),
            },
        }
    }

    pub fn is_ok(&self) -> bool {
        matches!(self, Outcome::Ok(_))
    }
}

#[derive(Debug, Serialize)]
pub struct FitReport {
    pub coeffs: [f64; 3],
    pub std_errors: [f64; 3],
    pub cov: [[f64; 3]; 3],
    pub n: usize,
    pub rss: f64,
}

impl From<&QuadraticFit> for FitReport {
    fn from(f: &QuadraticFit) -> Self {
        FitReport {
            coeffs: f.coeffs,
            std_errors: f.std_errors(),
            cov: f.cov,
            n: f.n,
            rss: f.rss,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct MethodReport {
    pub theta_star: IntervalEstimate,
    pub qber_star: IntervalEstimate,
    pub n_failures: usize,
}

impl From<&CrossoverInterval> for MethodReport {
    fn from(c: &CrossoverInterval) -> Self {
        MethodReport {
            theta_star: c.theta,
            qber_star: c.qber,
            n_failures: c.theta.n_failures,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct StateReport {
    pub state: Bb84State,
    pub n_records: usize,
    pub fit_a: Outcome<FitReport>,
    pub fit_b: Outcome<FitReport>,
    pub point: Outcome<IntersectionEstimate>,
    pub monte_carlo: Outcome<MethodReport>,
    pub bootstrap: Outcome<MethodReport>,
}

#[derive(Debug, Serialize)]
pub struct CumulativeReport {
    pub qber_star: IntervalEstimate,
    /// Replicates combined; the shortest per-state replicate array when
    /// states lost different numbers of replicates.
    pub n_replicates: usize,
}

#[derive(Debug, Serialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub config: AnalyzeConfig,
    pub states: Vec<StateReport>,
    pub cumulative: Outcome<CumulativeReport>,
}

pub struct Analysis {
    pub report: AnalysisReport,
    pub plot_csv: String,
}

impl Analysis {
    /// True when no state produced a crossover estimate.
    pub fn all_failed(&self) -> bool {
        self.report.states.iter().all(|s| !s.point.is_ok())
    }
}

fn series(
    records: &[ExperimentRecord],
    pick: impl Fn(&ExperimentRecord) -> f64,
) -> Vec<(f64, f64)> {
    records.iter().map(|r| (r.theta, pick(r))).collect()
}

pub fn analyze(records: &[ExperimentRecord], cfg: &AnalyzeConfig) -> Analysis {
    let mut states = Vec::new();
    let mut replicates: Vec<Option<Vec<f64>>> = Vec::new();
    let mut plot = String::from(PLOT_HEADER);
    plot.push('\n');

    for state in Bb84State::ALL {
        let subset: Vec<ExperimentRecord> = records
            .iter()
            .filter(|r| r.state == state)
            .cloned()
            .collect();
        if subset.is_empty() {
            continue;
        }
        let seed = derive_seed(cfg.seed, &[state.index() as u64]);
        let fit_a = fit_quadratic(&series(&subset, |r| r.fid_a));
        let fit_b = fit_quadratic(&series(&subset, |r| r.fid_b));
        let (point, mc) = match (&fit_a, &fit_b) {
            (Ok(a), Ok(b)) => (
                Outcome::from_result(&intersect(a, b, CROSSOVER_DOMAIN), |p| *p),
                Outcome::from_result(&monte_carlo_ci(a, b, cfg.reps, seed), |c| {
                    MethodReport::from(c)
                }),
            ),
            (Err(e), _) | (_, Err(e)) => (
                Outcome::Err { error: e.into() },
                Outcome::Err { error: e.into() },
            ),
        };
        let boot = bootstrap_ci(&subset, cfg.reps, seed, cfg.paired);

        if let (Ok(a), Ok(b)) = (&fit_a, &fit_b) {
            for k in 0..PLOT_POINTS {
                let theta = FRAC_PI_4 * k as f64 / (PLOT_POINTS - 1) as f64;
                let t = theory_curves(theta).expect("theta within [0, π/4]");
                let _ = writeln!(
                    plot,
                    "{},{theta},{},{},{},{}",
                    state.label(),
                    a.eval(theta),
                    b.eval(theta),
                    1.0 - t.e_b,
                    1.0 - t.e_e
                );
            }
        }

        replicates.push(boot.as_ref().ok().map(|c| c.qber_replicates.clone()));
        states.push(StateReport {
            state,
            n_records: subset.len(),
            fit_a: Outcome::from_result(&fit_a, |f| FitReport::from(f)),
            fit_b: Outcome::from_result(&fit_b, |f| FitReport::from(f)),
            point,
            monte_carlo: mc,
            bootstrap: Outcome::from_result(&boot, |c| MethodReport::from(c)),
        });
    }

    let cumulative = cumulative(&states, replicates);
    Analysis {
        report: AnalysisReport {
            schema_version: SCHEMA_VERSION,
            config: cfg.clone(),
            states,
            cumulative,
        },
        plot_csv: plot,
    }
}

fn cumulative(
    states: &[StateReport],
    replicates: Vec<Option<Vec<f64>>>,
) -> Outcome<CumulativeReport> {
    if states.len() != 4 {
        return Outcome::failure(
            "incomplete",
            format!(
                "cumulative estimate needs all 4 states, input has {}",
                states.len()
            ),
        );
    }
    let Some(arrays) = replicates.into_iter().collect::<Option<Vec<_>>>() else {
        return Outcome::failure("incomplete", "bootstrap failed for at least one state");
    };
    let len = arrays.iter().map(Vec::len).min().unwrap_or(0);
    let truncated: Vec<Vec<f64>> = arrays
        .into_iter()
        .map(|mut v| {
            v.truncate(len);
            v
        })
        .collect();
    Outcome::from_result(&aggregate_cumulative(&truncated), |qber_star| {
        CumulativeReport {
            qber_star: *qber_star,
            n_replicates: len,
        }
    })
}

/// Fails if any value in the tree is null, which is how non-finite floats
/// would surface after serialization.
pub fn check_finite(v: &Value, path: &mut String) -> Result<(), String> {
    match v {
        Value::Null => Err(format!("non-finite value at {path}")),
        Value::Array(items) => items.iter().enumerate().try_for_each(|(i, x)| {
            let len = path.len();
            let _ = write!(path, "[{i}]");
            let r = check_finite(x, path);
            path.truncate(len);
            r
        }),
        Value::Object(map) => map.iter().try_for_each(|(k, x)| {
            let len = path.len();
            let _ = write!(path, ".{k}");
            let r = check_finite(x, path);
            path.truncate(len);
            r
        }),
        _ => Ok(()),
    }
}
