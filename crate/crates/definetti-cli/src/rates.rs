//! Log-log slope fitting for convergence-rate estimation.

use anyhow::{bail, Result};
use serde::Serialize;

/// Least-squares fit of ln(distance) against ln(n). The sign convention is
/// distance ≍ n^slope, so a 1/n rate fits slope ≈ -1.
#[derive(Debug, Clone, Serialize)]
pub struct RateFit {
    pub ns: Vec<u32>,
    pub distances: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
}

pub fn fit_rate(ns: &[u32], distances: &[f64]) -> Result<RateFit> {
    if ns.len() != distances.len() {
        bail!(
            "fit_rate: {} grid points but {} distances",
            ns.len(),
            distances.len()
        );
    }
    if ns.len() < 4 {
        bail!("fit_rate needs at least 4 points, got {}", ns.len());
    }
    if !ns.windows(2).all(|w| w[0] < w[1]) {
        bail!("fit_rate: n grid must be strictly increasing");
    }
    if ns[0] == 0 {
        bail!("fit_rate: n must be positive");
    }
    if (ns[ns.len() - 1] as f64) < 10.0 * ns[0] as f64 {
        bail!(
            "fit_rate: grid spans less than a decade ({}..{})",
            ns[0],
            ns[ns.len() - 1]
        );
    }
    if let Some(d) = distances.iter().find(|d| !(d.is_finite() && **d > 0.0)) {
        bail!("fit_rate: distances must be positive and finite, got {d}");
    }

    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = distances.iter().map(|d| d.ln()).collect();
    let len = xs.len() as f64;
    let xbar = xs.iter().sum::<f64>() / len;
    let ybar = ys.iter().sum::<f64>() / len;
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - xbar) * (y - ybar))
        .sum();
    let sxx: f64 = xs.iter().map(|x| (x - xbar) * (x - xbar)).sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let max_residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (intercept + slope * x)).abs())
        .fold(0.0, f64::max);
    Ok(RateFit {
        ns: ns.to_vec(),
        distances: distances.to_vec(),
        slope,
        intercept,
        max_residual,
    })
}

/// `count` log-spaced integers from lo to hi inclusive, strictly increasing
/// after rounding.
pub fn log_grid(lo: u32, hi: u32, count: usize) -> Vec<u32> {
    assert!(lo >= 1 && hi > lo && count >= 2);
    let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let t = i as f64 / (count - 1) as f64;
        let n = (a + t * (b - a)).exp().round() as u32;
        let n = n.clamp(lo, hi);
        if out.last().is_none_or(|&last| n > last) {
            out.push(n);
        }
    }
    out
}

/// Default grid for perturbed-prior rate curves.
pub fn perturbed_rate_grid() -> Vec<u32> {
    log_grid(100, 100_000, 12)
}

/// Default grid for exact-law rate curves (law cost grows with n).
pub fn exact_rate_grid() -> Vec<u32> {
    log_grid(10, 1000, 10)
}
