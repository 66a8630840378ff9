//! Crossover analysis of the two clone-fidelity curves.
//!
//! Each curve is fit by a quadratic in the cloning angle. The angle where
//! Bob's curve overtakes Eve's, and the error rate there, are the quantities
//! of interest; their uncertainty is estimated by perturbing fit coefficients
//! (Monte-Carlo) and by resampling the sweep records (bootstrap).

use std::f64::consts::FRAC_PI_4;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiment::ExperimentRecord;
use crate::rng::{domain, stream};

pub const CONFIDENCE_LEVEL: f64 = 0.95;
const LOWER_QUANTILE: f64 = 0.025;
const UPPER_QUANTILE: f64 = 0.975;
pub const DEFAULT_REPS: usize = 10_000;
pub const MIN_MC_REPS: usize = 100;
pub const MIN_BOOTSTRAP_RECORDS: usize = 4;

/// Default search domain for the crossover angle.
pub const CROSSOVER_DOMAIN: (f64, f64) = (0.0, FRAC_PI_4);

/// `F(θ) = c0 + c1 θ + c2 θ²` with its coefficient covariance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadraticFit {
    pub coeffs: [f64; 3],
    pub cov: [[f64; 3]; 3],
    pub n: usize,
    pub rss: f64,
}

impl QuadraticFit {
    pub fn eval(&self, theta: f64) -> f64 {
        eval(&self.coeffs, theta)
    }

    pub fn std_errors(&self) -> [f64; 3] {
        [0, 1, 2].map(|i| self.cov[i][i].max(0.0).sqrt())
    }
}

fn eval(c: &[f64; 3], x: f64) -> f64 {
    c[0] + x * (c[1] + x * c[2])
}

/// Ordinary least squares via Householder QR of the Vandermonde design.
///
/// The covariance is `σ̂² (XᵀX)⁻¹` with `σ̂² = rss / (n − 3)`; with exactly
/// three points the fit interpolates and the covariance is zero.
pub fn fit_quadratic(points: &[(f64, f64)]) -> Result<QuadraticFit> {
    let n = points.len();
    if n < 3 {
        return Err(Error::RankDeficient);
    }
    // Column-major design matrix and right-hand side, reflected in place.
    let mut a: [Vec<f64>; 3] = [
        points.iter().map(|_| 1.0).collect(),
        points.iter().map(|p| p.0).collect(),
        points.iter().map(|p| p.0 * p.0).collect(),
    ];
    let mut y: Vec<f64> = points.iter().map(|p| p.1).collect();
    if a[1].iter().chain(&y).any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite sample".into()));
    }
    let col_scale: [f64; 3] = [0, 1, 2].map(|j| a[j].iter().map(|v| v * v).sum::<f64>().sqrt());

    let mut r = [[0.0; 3]; 3];
    for k in 0..3 {
        let norm = a[k][k..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm <= 1e-12 * col_scale[k].max(f64::MIN_POSITIVE) {
            return Err(Error::RankDeficient);
        }
        let alpha = if a[k][k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = a[k][k..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        let reflect = |col: &mut [f64]| {
            let dot: f64 = v.iter().zip(col.iter()).map(|(p, q)| p * q).sum();
            let f = 2.0 * dot / vnorm2;
            for (c, vi) in col.iter_mut().zip(&v) {
                *c -= f * vi;
            }
        };
        for col in a.iter_mut().skip(k) {
            reflect(&mut col[k..]);
        }
        reflect(&mut y[k..]);
        for j in k..3 {
            r[k][j] = a[j][k];
        }
    }

    let mut coeffs = [0.0; 3];
    for i in (0..3).rev() {
        let tail: f64 = (i + 1..3).map(|j| r[i][j] * coeffs[j]).sum();
        coeffs[i] = (y[i] - tail) / r[i][i];
    }
    let rss: f64 = points
        .iter()
        .map(|&(x, f)| (f - eval(&coeffs, x)).powi(2))
        .sum();

    // (XᵀX)⁻¹ = R⁻¹ R⁻ᵀ.
    let mut rinv = [[0.0; 3]; 3];
    for j in 0..3 {
        rinv[j][j] = 1.0 / r[j][j];
        for i in (0..j).rev() {
            let s: f64 = (i + 1..=j).map(|k| r[i][k] * rinv[k][j]).sum();
            rinv[i][j] = -s / r[i][i];
        }
    }
    let sigma2 = if n > 3 { rss / (n - 3) as f64 } else { 0.0 };
    let mut cov = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in i..3 {
            let s: f64 = (j..3).map(|k| rinv[i][k] * rinv[j][k]).sum();
            cov[i][j] = sigma2 * s;
            cov[j][i] = cov[i][j];
        }
    }
    Ok(QuadraticFit {
        coeffs,
        cov,
        n,
        rss,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntersectionEstimate {
    pub theta_star: f64,
    pub fid_star: f64,
    /// `1 − fid_star`.
    pub qber_star: f64,
}

/// Angle in `domain` where `F_A − F_B` changes sign from negative to
/// positive. If two such roots existed the smaller would be taken.
pub fn crossover_angle(a: &[f64; 3], b: &[f64; 3], domain: (f64, f64)) -> Result<f64> {
    let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    if d.iter().all(|&x| x == 0.0) {
        return Err(Error::NoCrossover("identical curves"));
    }
    let (lo, hi) = domain;
    let slope = |x: f64| d[1] + 2.0 * d[2] * x;
    let roots: Vec<f64> = if d[2] == 0.0 {
        if d[1] == 0.0 {
            return Err(Error::NoCrossover("curves are parallel"));
        }
        vec![-d[0] / d[1]]
    } else {
        let disc = d[1] * d[1] - 4.0 * d[2] * d[0];
        if disc < 0.0 {
            return Err(Error::NoCrossover("no real root"));
        }
        let q = -0.5 * (d[1] + d[1].signum() * disc.sqrt());
        if q == 0.0 {
            // Double root at zero with zero slope: a touch, not a crossing.
            return Err(Error::NoCrossover("curves touch without crossing"));
        }
        vec![q / d[2], d[0] / q]
    };
    let in_domain: Vec<f64> = roots
        .into_iter()
        .filter(|x| (lo..=hi).contains(x))
        .collect();
    if in_domain.is_empty() {
        return Err(Error::NoCrossover("no root in domain"));
    }
    in_domain
        .into_iter()
        .filter(|&x| slope(x) > 0.0)
        .min_by(f64::total_cmp)
        .ok_or(Error::NoCrossover("curves cross the wrong way"))
}

pub fn intersect(
    fit_a: &QuadraticFit,
    fit_b: &QuadraticFit,
    domain: (f64, f64),
) -> Result<IntersectionEstimate> {
    intersect_coeffs(&fit_a.coeffs, &fit_b.coeffs, domain)
}

fn intersect_coeffs(
    a: &[f64; 3],
    b: &[f64; 3],
    domain: (f64, f64),
) -> Result<IntersectionEstimate> {
    let theta_star = crossover_angle(a, b, domain)?;
    let fid_star = eval(a, theta_star);
    Ok(IntersectionEstimate {
        theta_star,
        fid_star,
        qber_star: 1.0 - fid_star,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntervalEstimate {
    pub mean: f64,
    pub lo: f64,
    pub hi: f64,
    pub level: f64,
    pub n_reps: usize,
    pub n_failures: usize,
}

impl IntervalEstimate {
    pub fn half_width(&self) -> f64 {
        (self.hi - self.lo) / 2.0
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Quantile of sorted data, linearly interpolating between order
/// statistics at position `p (n − 1)`.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty sample");
    let h = p.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let k = h.floor() as usize;
    let frac = h - k as f64;
    match sorted.get(k + 1) {
        Some(next) if frac > 0.0 => sorted[k] + frac * (next - sorted[k]),
        _ => sorted[k],
    }
}

/// Mean and central percentile interval of `values`.
pub fn percentile_interval(values: &[f64], n_failures: usize) -> Result<IntervalEstimate> {
    if values.is_empty() {
        return Err(Error::InvalidArgument("no replicates".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    // Shifted mean so that a constant sample reproduces its value exactly.
    let pivot = values[0];
    let mean = pivot + values.iter().map(|v| v - pivot).sum::<f64>() / values.len() as f64;
    Ok(IntervalEstimate {
        mean,
        lo: quantile_sorted(&sorted, LOWER_QUANTILE),
        hi: quantile_sorted(&sorted, UPPER_QUANTILE),
        level: CONFIDENCE_LEVEL,
        n_reps: values.len() + n_failures,
        n_failures,
    })
}

/// Replicate distribution of the crossover together with its summaries.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossoverInterval {
    pub theta: IntervalEstimate,
    pub qber: IntervalEstimate,
    /// Successful replicates in replicate order.
    pub theta_replicates: Vec<f64>,
    pub qber_replicates: Vec<f64>,
}

fn summarize(outcomes: Vec<Option<IntersectionEstimate>>) -> Result<CrossoverInterval> {
    let reps = outcomes.len();
    let ok: Vec<IntersectionEstimate> = outcomes.into_iter().flatten().collect();
    let failures = reps - ok.len();
    if 2 * failures > reps {
        return Err(Error::TooManyFailures { failures, reps });
    }
    let theta_replicates: Vec<f64> = ok.iter().map(|e| e.theta_star).collect();
    let qber_replicates: Vec<f64> = ok.iter().map(|e| e.qber_star).collect();
    Ok(CrossoverInterval {
        theta: percentile_interval(&theta_replicates, failures)?,
        qber: percentile_interval(&qber_replicates, failures)?,
        theta_replicates,
        qber_replicates,
    })
}

/// Redraws all six coefficients independently from normals centred on the
/// fitted values with the covariance-diagonal standard errors, and re-solves
/// the crossover. Off-diagonal covariance is ignored.
pub fn monte_carlo_ci(
    fit_a: &QuadraticFit,
    fit_b: &QuadraticFit,
    reps: usize,
    seed: u64,
) -> Result<CrossoverInterval> {
    if reps < MIN_MC_REPS {
        return Err(Error::InvalidArgument(format!(
            "Monte-Carlo needs at least {MIN_MC_REPS} replicates, got {reps}"
        )));
    }
    let dists = |fit: &QuadraticFit| -> Result<[Normal<f64>; 3]> {
        let se = fit.std_errors();
        let mk = |i: usize| {
            Normal::new(fit.coeffs[i], se[i])
                .map_err(|e| Error::InvalidArgument(format!("coefficient {i}: {e}")))
        };
        Ok([mk(0)?, mk(1)?, mk(2)?])
    };
    let (da, db) = (dists(fit_a)?, dists(fit_b)?);
    let outcomes = (0..reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream(seed, &[domain::MONTE_CARLO, r as u64]);
            let a = [0, 1, 2].map(|i| da[i].sample(&mut rng));
            let b = [0, 1, 2].map(|i| db[i].sample(&mut rng));
            intersect_coeffs(&a, &b, CROSSOVER_DOMAIN).ok()
        })
        .collect();
    summarize(outcomes)
}

/// Resamples records with replacement and refits both curves.
///
/// With `paired` the same index draw is used for the A and B series, since
/// both fidelities of a record come from the same shots; otherwise each
/// series gets its own draw.
pub fn bootstrap_ci(
    records: &[ExperimentRecord],
    reps: usize,
    seed: u64,
    paired: bool,
) -> Result<CrossoverInterval> {
    let n = records.len();
    if n < MIN_BOOTSTRAP_RECORDS {
        return Err(Error::InvalidArgument(format!(
            "bootstrap needs at least {MIN_BOOTSTRAP_RECORDS} records, got {n}"
        )));
    }
    if reps == 0 {
        return Err(Error::InvalidArgument(
            "bootstrap needs at least 1 replicate".into(),
        ));
    }
    let series_a: Vec<(f64, f64)> = records.iter().map(|r| (r.theta, r.fid_a)).collect();
    let series_b: Vec<(f64, f64)> = records.iter().map(|r| (r.theta, r.fid_b)).collect();
    fit_quadratic(&series_a)?;
    fit_quadratic(&series_b)?;

    let outcomes = (0..reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream(seed, &[domain::BOOTSTRAP, r as u64]);
            let draw = |rng: &mut crate::rng::StreamRng| -> Vec<usize> {
                (0..n).map(|_| rng.random_range(0..n)).collect()
            };
            let idx_a = draw(&mut rng);
            let idx_b = if paired {
                idx_a.clone()
            } else {
                draw(&mut rng)
            };
            let pick = |series: &[(f64, f64)], idx: &[usize]| -> Vec<(f64, f64)> {
                idx.iter().map(|&i| series[i]).collect()
            };
            let fa = fit_quadratic(&pick(&series_a, &idx_a)).ok()?;
            let fb = fit_quadratic(&pick(&series_b, &idx_b)).ok()?;
            intersect(&fa, &fb, CROSSOVER_DOMAIN).ok()
        })
        .collect();
    summarize(outcomes)
}

/// Combines per-state replicate arrays into the error rate of a key in which
/// each state occurs with frequency 1/4: replicate `r` of the aggregate is
/// the unweighted mean of replicate `r` of every state.
pub fn aggregate_cumulative(per_state: &[Vec<f64>]) -> Result<IntervalEstimate> {
    if per_state.len() != 4 {
        return Err(Error::InvalidArgument(format!(
            "expected 4 replicate arrays, got {}",
            per_state.len()
        )));
    }
    let len = per_state[0].len();
    if len == 0 || per_state.iter().any(|v| v.len() != len) {
        return Err(Error::InvalidArgument(
            "replicate arrays must be non-empty and of equal length".into(),
        ));
    }
    let combined: Vec<f64> = (0..len)
        .map(|r| {
            // Sorting makes the sum exactly invariant under permutation.
            let mut v = [
                per_state[0][r],
                per_state[1][r],
                per_state[2][r],
                per_state[3][r],
            ];
            v.sort_by(f64::total_cmp);
            ((v[0] + v[1]) + (v[2] + v[3])) / 4.0
        })
        .collect();
    percentile_interval(&combined, 0)
}
