use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use eavesdrop_core::bb84::{
    mutual_info, rate_report, run_protocol, theory_curves, Basis, RateReport,
};
use eavesdrop_core::experiment::{read_csv, run_sweep, write_records};
use eavesdrop_core::optimizer::{lagrange_residuals, optimal_coefficients, LagrangeSolution};
use eavesdrop_core::stats::MIN_MC_REPS;
use serde::Serialize;

use crate::angle::parse_grid;
use crate::args::{AnalyzeArgs, OptimizeArgs, ProtocolArgs, SweepArgs, TheoryArgs};
use crate::config::{FileConfig, ProtocolConfig};
use crate::error::{CliError, CliResult};
use crate::manifest::{emit, now, RunManifest};
use crate::report::{analyze, check_finite, Outcome, SCHEMA_VERSION};

pub const THEORY_HEADER: &str = "theta,f_a,f_b,e_b,e_e,i_ab,i_ae,s";

fn json_bytes(value: &impl Serialize) -> CliResult<Vec<u8>> {
    let tree = serde_json::to_value(value)?;
    check_finite(&tree, &mut String::from("$")).map_err(CliError::Analysis)?;
    let mut text = serde_json::to_string_pretty(&tree)?;
    text.push('\n');
    Ok(text.into_bytes())
}

#[derive(Serialize)]
struct TheoryConfig<'a> {
    grid: &'a str,
    points: usize,
}

pub fn theory(args: &TheoryArgs) -> CliResult<()> {
    let started = now();
    let grid = parse_grid(&args.grid).map_err(CliError::Usage)?;
    let mut csv = String::from(THEORY_HEADER);
    csv.push('\n');
    for &theta in &grid {
        let t = theory_curves(theta)?;
        let (f_a, f_b) = (1.0 - t.e_b, 1.0 - t.e_e);
        let s = rate_report(t.e_b)?.raw_rate;
        let _ = writeln!(
            csv,
            "{theta},{f_a},{f_b},{},{},{},{},{s}",
            t.e_b, t.e_e, t.i_ab, t.i_ae
        );
    }
    let config = TheoryConfig {
        grid: &args.grid,
        points: grid.len(),
    };
    let mut manifest = RunManifest::new("theory", &config, None, started)?;
    emit(args.out.as_deref(), csv.as_bytes(), &mut manifest)?;
    manifest.finish()
}

pub fn sweep(args: &SweepArgs, file: &FileConfig) -> CliResult<()> {
    let started = now();
    let cfg = file.sweep(args)?;
    let records = run_sweep(&cfg)?;
    let mut buf = Vec::new();
    write_records(&mut buf, &records)?;
    let mut manifest = RunManifest::new("sweep", &cfg, Some(cfg.seed), started)?;
    emit(args.out.as_deref(), &buf, &mut manifest)?;
    manifest.finish()
}

fn plot_path(args: &AnalyzeArgs) -> Option<PathBuf> {
    args.plot.clone().or_else(|| {
        args.out.as_ref().map(|out| {
            let mut p = out.clone().into_os_string();
            p.push(".plot.csv");
            PathBuf::from(p)
        })
    })
}

pub fn analyze_cmd(args: &AnalyzeArgs, file: &FileConfig) -> CliResult<()> {
    let started = now();
    let cfg = file.analyze(args)?;
    if cfg.reps < MIN_MC_REPS {
        return Err(CliError::Usage(format!(
            "--reps must be at least {MIN_MC_REPS}"
        )));
    }
    let records = read_csv(&args.input)?;
    if records.is_empty() {
        return Err(CliError::Data(format!(
            "{} contains no records",
            args.input.display()
        )));
    }
    let analysis = analyze(&records, &cfg);
    let bytes = json_bytes(&analysis.report)?;

    #[derive(Serialize)]
    struct Echo<'a> {
        input: &'a Path,
        #[serde(flatten)]
        cfg: &'a crate::config::AnalyzeConfig,
    }
    let echo = Echo {
        input: &args.input,
        cfg: &cfg,
    };
    let mut manifest = RunManifest::new("analyze", &echo, Some(cfg.seed), started)?;
    emit(args.out.as_deref(), &bytes, &mut manifest)?;
    if let Some(plot) = plot_path(args) {
        std::fs::write(&plot, analysis.plot_csv.as_bytes())?;
        manifest.outputs.push(plot.display().to_string());
    }
    manifest.finish()?;
    if analysis.all_failed() {
        return Err(CliError::Analysis(
            "no state produced a crossover estimate".into(),
        ));
    }
    Ok(())
}

fn bit_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

#[derive(Serialize)]
struct ProtocolReport {
    schema_version: u32,
    config: ProtocolConfig,
    rounds: usize,
    sifted_length: usize,
    sift_rate: f64,
    e_b_hat: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    e_e_hat: Option<f64>,
    /// Key rate with Eve assumed optimal for the observed `e_b_hat`.
    key_rate: Outcome<RateReport>,
    /// `1 − h(e_e_hat)` from Eve's actual measurements.
    #[serde(skip_serializing_if = "Option::is_none")]
    i_ae_observed: Option<Outcome<f64>>,
    sifted_bases: String,
    alice_key: String,
    bob_key: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    eve_key: Option<String>,
}

pub fn protocol(args: &ProtocolArgs, file: &FileConfig) -> CliResult<()> {
    let started = now();
    let cfg = file.protocol(args)?;
    let result = run_protocol(cfg.rounds, cfg.eve_theta, &cfg.noise, cfg.seed)?;
    let key_rate = rate_report(result.e_b_hat);
    let failed = key_rate.is_err();
    let report = ProtocolReport {
        schema_version: SCHEMA_VERSION,
        config: cfg.clone(),
        rounds: result.rounds,
        sifted_length: result.sifted_length,
        sift_rate: result.sifted_length as f64 / result.rounds as f64,
        e_b_hat: result.e_b_hat,
        e_e_hat: result.e_e_hat,
        key_rate: Outcome::from_result(&key_rate, |r| *r),
        i_ae_observed: result
            .e_e_hat
            .map(|e| Outcome::from_result(&mutual_info(e.min(1.0 - e)), |x| *x)),
        sifted_bases: result
            .sifted_bases
            .iter()
            .map(|b| match b {
                Basis::X => 'X',
                Basis::Y => 'Y',
            })
            .collect(),
        alice_key: bit_string(&result.alice_bits),
        bob_key: bit_string(&result.bob_bits),
        eve_key: result.eve_bits.as_deref().map(bit_string),
    };
    let bytes = json_bytes(&report)?;
    let mut manifest = RunManifest::new("protocol", &cfg, Some(cfg.seed), started)?;
    emit(args.out.as_deref(), &bytes, &mut manifest)?;
    manifest.finish()?;
    if failed {
        return Err(CliError::Analysis(format!(
            "observed error rate {} exceeds 1/2; no key rate",
            result.e_b_hat
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct OptimizeReport {
    schema_version: u32,
    eta_a: f64,
    solution: LagrangeSolution,
    residuals: [f64; 5],
}

pub fn optimize(args: &OptimizeArgs) -> CliResult<()> {
    let started = now();
    let solution = optimal_coefficients(args.eta_a)?;
    let report = OptimizeReport {
        schema_version: SCHEMA_VERSION,
        eta_a: args.eta_a,
        residuals: lagrange_residuals(&solution, args.eta_a),
        solution,
    };
    let bytes = json_bytes(&report)?;
    #[derive(Serialize)]
    struct Echo {
        eta_a: f64,
    }
    let mut manifest = RunManifest::new("optimize", &Echo { eta_a: args.eta_a }, None, started)?;
    emit(args.out.as_deref(), &bytes, &mut manifest)?;
    manifest.finish()
}
