//! Optimal asymmetric clones: maximize `η_B = 2μξ` subject to `2μν = η_A`
//! and `μ² + ν² + ξ² = 1`.
//!
//! The stationarity conditions are
//!
//! ```text
//! ξ = λ1 ν + λ2 μ,   0 = λ1 μ + λ2 ν,   μ = λ2 ξ,
//! 2μν = η_A,        μ² + ν² + ξ² = 1,
//! ```
//!
//! solved in closed form by `μ = 1/√2`, `ν = η_A/√2`, `ξ = √((1 − η_A²)/2)`,
//! `λ2 = μ/ξ`, `λ1 = −ν/ξ`, giving `η_B = √(1 − η_A²)`.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LagrangeSolution {
    pub mu: f64,
    pub nu: f64,
    pub xi: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub eta_b: f64,
}

/// Positive branch of the closed-form optimum for `η_A ∈ (0, 1)`.
pub fn optimal_coefficients(eta_a: f64) -> Result<LagrangeSolution> {
    if !(eta_a > 0.0 && eta_a < 1.0) {
        return Err(Error::domain("eta_a", eta_a, "(0, 1)"));
    }
    let mu = FRAC_1_SQRT_2;
    let nu = eta_a * FRAC_1_SQRT_2;
    let xi = ((1.0 - eta_a * eta_a) / 2.0).sqrt();
    Ok(LagrangeSolution {
        mu,
        nu,
        xi,
        lambda1: -nu / xi,
        lambda2: mu / xi,
        eta_b: 2.0 * mu * xi,
    })
}

/// Residuals of the five stationarity equations, in the order listed in
/// the module docs.
pub fn lagrange_residuals(sol: &LagrangeSolution, eta_a: f64) -> [f64; 5] {
    let LagrangeSolution {
        mu,
        nu,
        xi,
        lambda1,
        lambda2,
        ..
    } = *sol;
    [
        xi - lambda1 * nu - lambda2 * mu,
        lambda1 * mu + lambda2 * nu,
        mu - lambda2 * xi,
        2.0 * mu * nu - eta_a,
        mu * mu + nu * nu + xi * xi - 1.0,
    ]
}

/// Optimal `(η_A, η_B)` pairs at `η_A = k/(grid + 1)`, `k = 1..=grid`.
pub fn frontier(grid: usize) -> Result<Vec<(f64, f64)>> {
    if grid < 2 {
        return Err(Error::InvalidArgument(format!(
            "frontier grid needs at least 2 points, got {grid}"
        )));
    }
    (1..=grid)
        .map(|k| {
            let eta_a = k as f64 / (grid + 1) as f64;
            optimal_coefficients(eta_a).map(|s| (eta_a, s.eta_b))
        })
        .collect()
}
