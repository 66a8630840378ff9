use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};

use eavesdrop_core::bb84::Bb84State;
use eavesdrop_core::experiment::ExperimentRecord;
use eavesdrop_core::rng::{stream, StreamRng};
use eavesdrop_core::stats::{
    bootstrap_ci, crossover_angle, fit_quadratic, intersect, monte_carlo_ci, CROSSOVER_DOMAIN,
};
use rand::Rng;
use rand_distr::{Distribution, Normal};

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Least squares through the normal equations, solved by Cramer's rule.
fn normal_equations(points: &[(f64, f64)]) -> [f64; 3] {
    let mut s = [0.0; 5];
    let mut t = [0.0; 3];
    for &(x, y) in points {
        for (k, sk) in s.iter_mut().enumerate() {
            *sk += x.powi(k as i32);
        }
        for (k, tk) in t.iter_mut().enumerate() {
            *tk += y * x.powi(k as i32);
        }
    }
    let m = [[s[0], s[1], s[2]], [s[1], s[2], s[3]], [s[2], s[3], s[4]]];
    let d = det3(m);
    [0, 1, 2].map(|j| {
        let mut mj = m;
        for i in 0..3 {
            mj[i][j] = t[i];
        }
        det3(mj) / d
    })
}

fn synthetic_records(rng: &mut StreamRng, n: usize, sigma: f64) -> Vec<ExperimentRecord> {
    let noise = Normal::new(0.0, sigma).unwrap();
    (0..n)
        .map(|_| {
            let theta = rng.random_range(0.0..=FRAC_PI_4);
            ExperimentRecord {
                state: Bb84State::Plus,
                theta,
                shots: 1,
                fid_a: (1.0 + (2.0 * theta).sin()) / 2.0 + noise.sample(rng),
                fid_b: (1.0 + (2.0 * theta).cos()) / 2.0 + noise.sample(rng),
            }
        })
        .collect()
}

#[test]
fn fit_matches_normal_equations() {
    let mut rng = stream(1, &[]);
    for _ in 0..50 {
        let n = rng.random_range(4..200);
        let c: [f64; 3] = [0, 1, 2].map(|_| rng.random_range(-2.0..2.0));
        let pts: Vec<(f64, f64)> = (0..n)
            .map(|_| {
                let x = rng.random_range(0.0..FRAC_PI_4);
                (
                    x,
                    c[0] + c[1] * x + c[2] * x * x + rng.random_range(-0.1..0.1),
                )
            })
            .collect();
        let fit = fit_quadratic(&pts).unwrap();
        let oracle = normal_equations(&pts);
        for (g, w) in fit.coeffs.iter().zip(oracle) {
            assert!(
                (g - w).abs() <= 1e-8 * w.abs().max(1.0),
                "{:?} vs {oracle:?}",
                fit.coeffs
            );
        }
    }
}

#[test]
fn recovers_planted_root() {
    let mut rng = stream(2, &[]);
    for _ in 0..200 {
        let theta0 = rng.random_range(0.01..FRAC_PI_4 - 0.01);
        let other = if rng.random_bool(0.5) {
            rng.random_range(-3.0..-0.1)
        } else {
            rng.random_range(1.0..3.0)
        };
        // d(θ) = k (θ − θ0)(θ − other) with positive slope at θ0.
        let k = rng.random_range(0.2..2.0) * (theta0 - other).signum();
        let d = [k * theta0 * other, -k * (theta0 + other), k];
        let b: [f64; 3] = [0, 1, 2].map(|_| rng.random_range(-1.0..1.0));
        let a = [b[0] + d[0], b[1] + d[1], b[2] + d[2]];
        let got = crossover_angle(&a, &b, CROSSOVER_DOMAIN).unwrap();
        assert!((got - theta0).abs() < 1e-12, "{got} vs {theta0}");
    }
}

#[test]
fn noisy_fit_near_best_quadratic() {
    // Best quadratic to the A curve on a grid ten times denser than the data.
    let dense: Vec<(f64, f64)> = (0..1000)
        .map(|k| {
            let x = FRAC_PI_4 * (k as f64 + 0.5) / 1000.0;
            (x, (1.0 + (2.0 * x).sin()) / 2.0)
        })
        .collect();
    let best = normal_equations(&dense);
    for seed in 0..20 {
        let records = synthetic_records(&mut stream(100 + seed, &[]), 100, 0.03);
        let pts: Vec<(f64, f64)> = records.iter().map(|r| (r.theta, r.fid_a)).collect();
        let fit = fit_quadratic(&pts).unwrap();
        let se = fit.std_errors();
        for i in 0..3 {
            assert!(
                (fit.coeffs[i] - best[i]).abs() < 5.0 * se[i],
                "seed {seed} coeff {i}"
            );
        }
    }
}

#[test]
fn bootstrap_coverage() {
    let mut covered = 0;
    for d in 0..100 {
        let records = synthetic_records(&mut stream(7000 + d, &[]), 100, 0.03);
        let ci = bootstrap_ci(&records, 1000, d, true).unwrap();
        if ci.theta.contains(FRAC_PI_8) {
            covered += 1;
        }
    }
    assert!(covered >= 90, "covered {covered} of 100");
}

#[test]
fn monte_carlo_agrees_with_bootstrap() {
    for d in 0..5 {
        let records = synthetic_records(&mut stream(300 + d, &[]), 100, 0.03);
        let fa = fit_quadratic(
            &records
                .iter()
                .map(|r| (r.theta, r.fid_a))
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let fb = fit_quadratic(
            &records
                .iter()
                .map(|r| (r.theta, r.fid_b))
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let mc = monte_carlo_ci(&fa, &fb, 2000, d).unwrap();
        let bs = bootstrap_ci(&records, 2000, d, true).unwrap();
        let wider = mc.theta.half_width().max(bs.theta.half_width());
        assert!((mc.theta.mean - bs.theta.mean).abs() < wider);
        let point = intersect(&fa, &fb, CROSSOVER_DOMAIN).unwrap();
        assert_eq!(point.qber_star, 1.0 - point.fid_star);
    }
}

#[test]
fn unpaired_bootstrap_is_also_consistent() {
    let records = synthetic_records(&mut stream(41, &[]), 100, 0.03);
    let paired = bootstrap_ci(&records, 1000, 1, true).unwrap();
    let unpaired = bootstrap_ci(&records, 1000, 1, false).unwrap();
    assert_ne!(paired.theta_replicates, unpaired.theta_replicates);
    assert!((paired.theta.mean - unpaired.theta.mean).abs() < paired.theta.half_width());
}

#[test]
fn intervals_are_deterministic() {
    let records = synthetic_records(&mut stream(42, &[]), 60, 0.03);
    assert_eq!(
        bootstrap_ci(&records, 500, 9, true).unwrap(),
        bootstrap_ci(&records, 500, 9, true).unwrap()
    );
    let fa = fit_quadratic(
        &records
            .iter()
            .map(|r| (r.theta, r.fid_a))
            .collect::<Vec<_>>(),
    )
    .unwrap();
    let fb = fit_quadratic(
        &records
            .iter()
            .map(|r| (r.theta, r.fid_b))
            .collect::<Vec<_>>(),
    )
    .unwrap();
    assert_eq!(
        monte_carlo_ci(&fa, &fb, 500, 9).unwrap(),
        monte_carlo_ci(&fa, &fb, 500, 9).unwrap()
    );
}
