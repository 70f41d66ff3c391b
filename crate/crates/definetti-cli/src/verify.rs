//! The full verification suite: every explicit bound, constant, identity,
//! and rate in one deterministic run, reported as machine-readable checks.

use crate::rates::{exact_rate_grid, fit_rate, perturbed_rate_grid};
use anyhow::Result;
use definetti::{
    bootstrap_dw_se, bound_constants, bound_constants_quadrature, chen_bound_check,
    dk_mean_vs_prior, dual_lower_bound_psi, dw_mean_vs_prior, dw_perturbed_prior, empirical_dw,
    mean_law, simulate_urn, tv_distance, Accuracy, MixingMeasure, QuadratureConfig, UrnConfig,
};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub check_name: String,
    pub status: Status,
    pub measured: f64,
    pub bound: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn get(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.check_name == name)
    }
}

/// measured must stay at or below bound.
fn check_le(name: &str, measured: f64, bound: f64) -> CheckOutcome {
    CheckOutcome {
        check_name: name.to_string(),
        status: if measured <= bound && measured.is_finite() {
            Status::Pass
        } else {
            Status::Fail
        },
        measured,
        bound,
        margin: bound - measured,
    }
}

/// measured must stay at or above bound (strict = no touching).
fn check_ge(name: &str, measured: f64, bound: f64, strict: bool) -> CheckOutcome {
    let ok = measured.is_finite() && if strict { measured > bound } else { measured >= bound };
    CheckOutcome {
        check_name: name.to_string(),
        status: if ok { Status::Pass } else { Status::Fail },
        measured,
        bound,
        margin: measured - bound,
    }
}

struct GridPoint {
    dw: f64,
    dk: f64,
    dual_psi: f64,
    m11: f64,
    n: u32,
}

fn sandwich_grid(cfg: &QuadratureConfig) -> Result<Vec<GridPoint>> {
    let measures = vec![
        MixingMeasure::beta(1.0, 1.0)?,
        MixingMeasure::beta(2.0, 3.0)?,
        MixingMeasure::beta(0.5, 0.5)?,
        MixingMeasure::power_law(0.2)?,
        MixingMeasure::power_law(0.8)?,
    ];
    let ns = [1u32, 2, 5, 10, 20, 50, 100, 200];
    let jobs: Vec<(&MixingMeasure, u32)> = measures
        .iter()
        .flat_map(|m| ns.iter().map(move |&n| (m, n)))
        .collect();
    jobs.par_iter()
        .map(|&(mu, n)| {
            let law = mean_law(mu, n, cfg)?;
            Ok(GridPoint {
                dw: dw_mean_vs_prior(&law, mu)?,
                dk: dk_mean_vs_prior(&law, mu)?,
                dual_psi: dual_lower_bound_psi(&law, mu)?,
                m11: mu.moment_theta_one_minus_theta()?,
                n,
            })
        })
        .collect()
}

fn perturbed_curve(
    mu: &MixingMeasure,
    ns: &[u32],
    cfg: &QuadratureConfig,
) -> Result<Vec<f64>> {
    ns.par_iter()
        .map(|&n| Ok(dw_perturbed_prior(mu, n, cfg)?))
        .collect()
}

/// Run the whole acceptance grid. `quadrature` flows into every numeric
/// sub-operation; rate curves floor its tolerances at 1e-9/1e-7 (slope
/// windows are 0.05 wide, so per-point accuracy beyond that is wasted),
/// while looser tolerances propagate unchanged. `seed` drives the Monte
/// Carlo checks.
pub fn verify_full_suite(quadrature: &QuadratureConfig, seed: u64) -> Result<VerifyReport> {
    quadrature.validate()?;
    let cfg = quadrature;
    let mut checks = Vec::new();

    // 1: hand-integrable uniform-prior values
    {
        let mu = MixingMeasure::beta(1.0, 1.0)?;
        let law1 = mean_law(&mu, 1, cfg)?;
        let law2 = mean_law(&mu, 2, cfg)?;
        let e1 = (dw_mean_vs_prior(&law1, &mu)? - 0.25).abs();
        let e2 = (dw_mean_vs_prior(&law2, &mu)? - 5.0 / 36.0).abs();
        checks.push(check_le("closed_form_exactness", e1.max(e2), 1e-12));
    }

    // 2, 9, 10 share one grid of exact laws
    {
        let grid = sandwich_grid(cfg)?;
        let sandwich_margin = grid
            .iter()
            .map(|g| {
                let lower = g.m11 / g.n as f64;
                (g.dw - lower).min(lower.sqrt() - g.dw)
            })
            .fold(f64::INFINITY, f64::min);
        checks.push(check_ge("moment_sandwich", sandwich_margin, 0.0, true));

        let dual_err = grid
            .iter()
            .map(|g| (g.dual_psi - g.m11 / g.n as f64).abs())
            .fold(0.0, f64::max);
        checks.push(check_le("dual_lower_identity", dual_err, 1e-10));

        let dk_margin = grid
            .iter()
            .map(|g| g.dk - g.dw)
            .fold(f64::INFINITY, f64::min);
        checks.push(check_ge("kolmogorov_dominates", dk_margin, 0.0, false));
    }

    // 3: smooth upper bound over the Beta grid, both constant routes
    {
        let params: Vec<f64> = (0..5).map(|i| 0.5 + i as f64 * 0.625).collect();
        let pairs: Vec<(f64, f64)> = params
            .iter()
            .flat_map(|&a| params.iter().map(move |&b| (a, b)))
            .collect();
        let ns = exact_rate_grid();
        let results: Result<Vec<(f64, f64)>> = pairs
            .par_iter()
            .map(|&(a, b)| {
                let mu = MixingMeasure::beta(a, b)?;
                let closed = bound_constants(&mu, cfg)?;
                let quad = bound_constants_quadrature(&mu, cfg)?;
                let c = closed.c_alpha_beta.expect("closed Beta constant");
                let mut min_margin = f64::INFINITY;
                for &n in &ns {
                    let law = mean_law(&mu, n, cfg)?;
                    let dw = dw_mean_vs_prior(&law, &mu)?;
                    min_margin = min_margin.min(c / n as f64 - dw);
                }
                Ok((min_margin, (closed.c2 - quad.c2).abs()))
            })
            .collect();
        let results = results?;
        let min_margin = results.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
        let max_cdiff = results.iter().map(|r| r.1).fold(0.0, f64::max);
        checks.push(check_ge("beta_grid_upper_bound", min_margin, 0.0, false));
        checks.push(check_le("beta_constant_dual_route", max_cdiff, 1e-8));
    }

    // 4: exact vs perturbed within the second-moment gap
    {
        let measures = [MixingMeasure::beta(2.0, 2.0)?, MixingMeasure::power_law(0.5)?];
        let ns = [10u32, 50, 200];
        let jobs: Vec<(&MixingMeasure, u32)> = measures
            .iter()
            .flat_map(|m| ns.iter().map(move |&n| (m, n)))
            .collect();
        let excesses: Result<Vec<f64>> = jobs
            .par_iter()
            .map(|&(mu, n)| {
                let law = mean_law(mu, n, cfg)?;
                let dw = dw_mean_vs_prior(&law, mu)?;
                let dwp = dw_perturbed_prior(mu, n, cfg)?;
                let gap = mu.moment_sq_plus_comp_sq()? / n as f64;
                Ok((dw - dwp).abs() - gap)
            })
            .collect();
        let worst = excesses?.into_iter().fold(f64::NEG_INFINITY, f64::max);
        checks.push(check_le("equivalence_gap", worst, 1e-8));
    }

    // 5: standardized Binomial vs normal, Wasserstein bound
    {
        let mut min_margin = f64::INFINITY;
        for i in 1..=9 {
            let t = i as f64 / 10.0;
            for n in [1u32, 4, 16, 64, 256] {
                let (lhs, rhs) = chen_bound_check(t, n)?;
                min_margin = min_margin.min(rhs - lhs);
            }
        }
        checks.push(check_ge(
            "standardized_binomial_normal_bound",
            min_margin,
            0.0,
            false,
        ));
    }

    // 6: endpoint mass scales d_W by (1-q)
    {
        let b22 = MixingMeasure::beta(2.0, 2.0)?;
        let mut worst: f64 = 0.0;
        for n in [5u32, 50] {
            let law = mean_law(&b22, n, cfg)?;
            let base = dw_mean_vs_prior(&law, &b22)?;
            for q in [0.25, 0.5] {
                let mixed = MixingMeasure::mixture(vec![
                    (q, MixingMeasure::dirac(0.0)?),
                    (1.0 - q, b22.clone()),
                ])?;
                let mlaw = mean_law(&mixed, n, cfg)?;
                let got = dw_mean_vs_prior(&mlaw, &mixed)?;
                worst = worst.max((got - (1.0 - q) * base).abs());
            }
        }
        checks.push(check_le("boundary_mass_scaling", worst, 1e-8));
    }

    // 7: convergence rates on perturbed-prior curves
    {
        let curve_cfg = QuadratureConfig {
            accuracy: Accuracy {
                abs_tol: quadrature.accuracy.abs_tol.max(1e-9),
                rel_tol: quadrature.accuracy.rel_tol.max(1e-7),
            },
            ..*quadrature
        };
        let ns = perturbed_rate_grid();
        for gamma in [0.2, 0.5, 0.8] {
            let mu = MixingMeasure::power_law(gamma)?;
            let ds = perturbed_curve(&mu, &ns, &curve_cfg)?;
            let fit = fit_rate(&ns, &ds)?;
            let target = -(1.0 + gamma) / 2.0;
            let name = format!("powerlaw_rate_gamma_{:02}", (gamma * 10.0).round() as u32);
            checks.push(check_le(&name, (fit.slope - target).abs(), 0.05));
        }
        {
            let mu = MixingMeasure::dirac(0.5)?;
            let ds = perturbed_curve(&mu, &ns, &curve_cfg)?;
            let worst = ns
                .iter()
                .zip(&ds)
                .map(|(&n, &d)| {
                    (d - 1.0 / (2.0 * std::f64::consts::PI * n as f64).sqrt()).abs()
                })
                .fold(0.0, f64::max);
            checks.push(check_le("dirac_perturbed_closed_form", worst, 1e-8));
        }
        {
            let mu = MixingMeasure::beta(2.0, 3.0)?;
            let ds = perturbed_curve(&mu, &ns, &curve_cfg)?;
            let fit = fit_rate(&ns, &ds)?;
            checks.push(check_le("beta_rate_slope", (fit.slope + 1.0).abs(), 0.05));
        }
    }

    // 8: urn Monte Carlo against the exact law
    {
        let urn = UrnConfig {
            a: 2,
            b: 3,
            m: 1,
            n: 20,
            replications: 1_000_000,
            seed,
        };
        let emp = simulate_urn(&urn)?;
        let mu = urn.mixing_measure()?;
        let law = mean_law(&mu, 20, cfg)?;
        checks.push(check_le("urn_tv_distance", tv_distance(&emp, &law)?, 0.01));

        let dw = dw_mean_vs_prior(&law, &mu)?;
        let emp_dw = empirical_dw(&emp, &mu)?;
        let se = bootstrap_dw_se(&emp, &mu, 200, seed.wrapping_add(1))?;
        checks.push(check_le("urn_empirical_dw", (emp_dw - dw).abs(), 3.0 * se));
    }

    Ok(VerifyReport { checks })
}
