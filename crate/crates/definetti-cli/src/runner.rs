//! Distance-curve runs: one DistanceReport per grid point, with every
//! report invariant enforced, plus CSV serialization.

use anyhow::{bail, Context, Result};
use definetti::{
    check_report_invariants, distance_report, dk_mean_vs_prior, dual_lower_bound_psi,
    dw_mean_vs_prior, mean_law, simulate_exchangeable, DistanceReport, EmpiricalLaw,
    MixingMeasure, QuadratureConfig,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Exact law of X̄ₙ: dw_exact, dk, dual_lower_psi.
    Exact,
    /// Gaussian-perturbed prior only: dw_perturbed.
    Perturbed,
    /// Both of the above.
    Both,
    /// Monte Carlo: the exact-law columns hold empirical estimates from
    /// simulated exchangeable draws (requires seed; replications default
    /// 1e6).
    UrnMc,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub measure: MixingMeasure,
    pub n_grid: Vec<u32>,
    pub mode: Mode,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub replications: Option<u64>,
    #[serde(default)]
    pub output_path: Option<String>,
}

const DEFAULT_REPLICATIONS: u64 = 1_000_000;

/// Numeric slack granted to strict inequalities when the measured side is a
/// Monte Carlo estimate: ~6 standard errors of a cell frequency.
fn mc_budget(replications: u64) -> f64 {
    6.0 / (replications as f64).sqrt()
}

fn empirical_report(
    mu: &MixingMeasure,
    n: u32,
    cfg: &QuadratureConfig,
    emp: &EmpiricalLaw,
) -> Result<DistanceReport> {
    // bounds come from the measure; distance columns from the empirical law
    let mut r = distance_report(mu, n, cfg, false, false)?;
    let law = definetti::ExactMeanLaw {
        n,
        probs: emp.probs(),
        mu_mean: mu.mean()?,
        clamped_tail: false,
    };
    r.dw_exact = Some(dw_mean_vs_prior(&law, mu)?);
    r.dk = Some(dk_mean_vs_prior(&law, mu)?);
    r.dual_lower_psi = Some(dual_lower_bound_psi(&law, mu)?);
    Ok(r)
}

/// One DistanceReport per n, ordered by the grid; any violated report
/// invariant aborts with the measure, n, and inequality named.
pub fn run_distance_curve(cfg: &RunConfig) -> Result<Vec<DistanceReport>> {
    if cfg.n_grid.is_empty() {
        bail!("n_grid must be nonempty");
    }
    if cfg.n_grid.iter().any(|&n| n == 0) {
        bail!("n_grid entries must be >= 1");
    }
    cfg.quadrature.validate()?;
    let (want_exact, want_perturbed) = match cfg.mode {
        Mode::Exact => (true, false),
        Mode::Perturbed => (false, true),
        Mode::Both => (true, true),
        Mode::UrnMc => (false, false),
    };
    if cfg.mode == Mode::UrnMc && cfg.seed.is_none() {
        bail!("mode urn_mc requires a seed");
    }
    let replications = cfg.replications.unwrap_or(DEFAULT_REPLICATIONS);
    let budget = match cfg.mode {
        Mode::UrnMc => mc_budget(replications),
        _ => 1e-8,
    };
    let reports: Result<Vec<DistanceReport>> = cfg
        .n_grid
        .par_iter()
        .map(|&n| {
            let r = if cfg.mode == Mode::UrnMc {
                let emp = simulate_exchangeable(
                    &cfg.measure,
                    n,
                    replications,
                    cfg.seed.expect("checked above"),
                )?;
                empirical_report(&cfg.measure, n, &cfg.quadrature, &emp)
                    .with_context(|| format!("measure {}, n={n}", cfg.measure))?
            } else {
                distance_report(&cfg.measure, n, &cfg.quadrature, want_exact, want_perturbed)
                    .with_context(|| format!("measure {}, n={n}", cfg.measure))?
            };
            let violations = check_report_invariants(&r, budget);
            if !violations.is_empty() {
                bail!(
                    "invariant failure for measure {}, n={n}: {}",
                    cfg.measure,
                    violations.join("; ")
                );
            }
            Ok(r)
        })
        .collect();
    reports
}

/// Warnings that do not abort a run: distances are expected to decrease
/// along an increasing n grid once n is moderate, but small-n
/// non-monotonicity is legitimate.
pub fn monotonicity_warnings(reports: &[DistanceReport]) -> Vec<String> {
    let mut out = Vec::new();
    for w in reports.windows(2) {
        if let (Some(a), Some(b)) = (w[0].dw_exact, w[1].dw_exact) {
            if b > a && w[0].n >= 10 {
                out.push(format!(
                    "dw_exact increased from n={} ({a}) to n={} ({b})",
                    w[0].n, w[1].n
                ));
            }
        }
    }
    out
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// CSV with shortest-roundtrip floats; absent columns stay empty.
pub fn reports_to_csv(reports: &[DistanceReport]) -> String {
    let mut out = String::from(
        "n,dw_exact,dk,dw_perturbed,lower_bound,upper_crude,upper_smooth,equivalence_gap_bound,dual_lower_psi\n",
    );
    for r in reports {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.n,
            cell(r.dw_exact),
            cell(r.dk),
            cell(r.dw_perturbed),
            r.lower_bound,
            r.upper_crude,
            cell(r.upper_smooth),
            r.equivalence_gap_bound,
            cell(r.dual_lower_psi),
        ));
    }
    out
}

/// C_{α,β} relative to a user-supplied constant for the same Beta measure.
pub fn compare_constant(mu: &MixingMeasure, external_constant: f64) -> Result<f64> {
    if !matches!(mu, MixingMeasure::Beta { .. }) {
        bail!("compare_constant requires a Beta measure, got {mu}");
    }
    if !(external_constant.is_finite() && external_constant > 0.0) {
        bail!("external constant must be positive and finite, got {external_constant}");
    }
    let c = definetti::bound_constants(mu, &QuadratureConfig::default())?;
    let c_ab = c
        .c_alpha_beta
        .expect("Beta constants always carry the closed form");
    Ok(c_ab / external_constant)
}

/// Exact mean-law CSV for one (measure, n).
pub fn law_to_csv(mu: &MixingMeasure, n: u32, cfg: &QuadratureConfig) -> Result<String> {
    let law = mean_law(mu, n, cfg)?;
    Ok(law.to_csv())
}
