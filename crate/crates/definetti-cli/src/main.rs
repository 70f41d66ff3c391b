use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use definetti::{
    chen_bound_check, csv_metadata, dw_mean_vs_prior, empirical_dw, mean_law, simulate_urn,
    tv_distance, MixingMeasure, QuadratureConfig, UrnConfig,
};
use definetti_cli::{
    exact_rate_grid, fit_rate, perturbed_rate_grid, reports_to_csv, run_distance_curve,
    verify_full_suite, Mode, RunConfig,
};
use serde::Serialize;
use std::path::PathBuf;

/// Exact laws, Wasserstein/Kolmogorov distances, rate fits, and bound
/// verification for empirical means of exchangeable Bernoulli sequences.
#[derive(Parser)]
#[command(name = "definetti", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exact,
    Perturbed,
    Both,
    UrnMc,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Perturbed => Mode::Perturbed,
            ModeArg::Both => Mode::Both,
            ModeArg::UrnMc => Mode::UrnMc,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CurveKind {
    /// Fit on dw_exact over a small-n grid.
    Exact,
    /// Fit on dw_perturbed over a large-n grid.
    Perturbed,
}

#[derive(Subcommand)]
enum Cmd {
    /// Distances and bounds for one measure over an n grid (JSON to stdout,
    /// CSV via --out).
    Distance {
        /// Mixing measure: inline JSON or a path to a JSON file.
        #[arg(long)]
        measure: String,
        /// Comma-separated n values.
        #[arg(long, value_delimiter = ',', required = true)]
        n_grid: Vec<u32>,
        #[arg(long, value_enum, default_value = "exact")]
        mode: ModeArg,
        /// Absolute quadrature tolerance (default 1e-12).
        #[arg(long)]
        tol: Option<f64>,
        /// RNG seed; mandatory when mode is urn-mc.
        #[arg(long)]
        seed: Option<u64>,
        /// Monte Carlo replications for urn-mc mode (default 1000000).
        #[arg(long)]
        replications: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit a log-log convergence rate for one measure.
    RateFit {
        /// Mixing measure: inline JSON or a path to a JSON file.
        #[arg(long)]
        measure: String,
        #[arg(long, value_enum, default_value = "perturbed")]
        kind: CurveKind,
        /// Comma-separated n values (default: log-spaced per kind).
        #[arg(long, value_delimiter = ',')]
        n_grid: Option<Vec<u32>>,
        #[arg(long)]
        tol: Option<f64>,
        /// Write the underlying distance curve as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate a reinforced urn and compare with the exact law.
    UrnSim {
        /// Initial white balls.
        #[arg(long)]
        a: u64,
        /// Initial black balls.
        #[arg(long)]
        b: u64,
        /// Balls added back per draw.
        #[arg(long)]
        m: u64,
        /// Draws per replication.
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 1_000_000)]
        replications: u64,
        /// RNG seed (results are byte-identical per seed).
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        tol: Option<f64>,
        /// Write the count histogram as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Wasserstein normal-approximation bound for standardized Binomial
    /// means over a (t, n) grid; exits nonzero if the bound ever fails.
    ChenCheck {
        /// Comma-separated t values in (0,1), default 0.1..0.9.
        #[arg(long, value_delimiter = ',')]
        t_grid: Option<Vec<f64>>,
        /// Comma-separated n values, default 1,4,16,64,256.
        #[arg(long, value_delimiter = ',')]
        n_grid: Option<Vec<u32>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the full verification suite; exits nonzero if any check fails.
    Verify {
        /// RNG seed for the Monte Carlo checks.
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        tol: Option<f64>,
        /// Write the JSON report to a file as well as stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_measure(text: &str) -> Result<MixingMeasure> {
    let json = if text.trim_start().starts_with('{') {
        text.to_string()
    } else {
        std::fs::read_to_string(text).with_context(|| format!("reading measure file {text}"))?
    };
    Ok(MixingMeasure::from_json(&json)?)
}

fn quad_cfg(tol: Option<f64>) -> Result<QuadratureConfig> {
    let mut cfg = QuadratureConfig::default();
    if let Some(t) = tol {
        cfg = cfg.with_abs_tol(t);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write_out(path: &Option<PathBuf>, content: &str) -> Result<()> {
    if let Some(p) = path {
        std::fs::write(p, content).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ChenRow {
    t: f64,
    n: u32,
    lhs: f64,
    rhs: f64,
    margin: f64,
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Distance {
            measure,
            n_grid,
            mode,
            tol,
            seed,
            replications,
            out,
        } => {
            let cfg = RunConfig {
                measure: parse_measure(&measure)?,
                n_grid,
                mode: mode.into(),
                quadrature: quad_cfg(tol)?,
                seed,
                replications,
                output_path: out.as_ref().map(|p| p.display().to_string()),
            };
            let reports = run_distance_curve(&cfg)?;
            for w in definetti_cli::monotonicity_warnings(&reports) {
                eprintln!("warning: {w}");
            }
            write_out(&out, &reports_to_csv(&reports))?;
            println!("{}", serde_json::to_string_pretty(&reports)?);
        }
        Cmd::RateFit {
            measure,
            kind,
            n_grid,
            tol,
            out,
        } => {
            let mu = parse_measure(&measure)?;
            let ns = n_grid.unwrap_or_else(|| match kind {
                CurveKind::Exact => exact_rate_grid(),
                CurveKind::Perturbed => perturbed_rate_grid(),
            });
            let cfg = RunConfig {
                measure: mu,
                n_grid: ns.clone(),
                mode: match kind {
                    CurveKind::Exact => Mode::Exact,
                    CurveKind::Perturbed => Mode::Perturbed,
                },
                quadrature: quad_cfg(tol)?,
                seed: None,
                replications: None,
                output_path: None,
            };
            let reports = run_distance_curve(&cfg)?;
            let distances: Vec<f64> = reports
                .iter()
                .map(|r| match kind {
                    CurveKind::Exact => r.dw_exact.expect("exact mode fills dw_exact"),
                    CurveKind::Perturbed => {
                        r.dw_perturbed.expect("perturbed mode fills dw_perturbed")
                    }
                })
                .collect();
            let fit = fit_rate(&ns, &distances)?;
            write_out(&out, &reports_to_csv(&reports))?;
            println!("{}", serde_json::to_string_pretty(&fit)?);
        }
        Cmd::UrnSim {
            a,
            b,
            m,
            n,
            replications,
            seed,
            tol,
            out,
        } => {
            let urn = UrnConfig {
                a,
                b,
                m,
                n,
                replications,
                seed,
            };
            let emp = simulate_urn(&urn)?;
            let mu = urn.mixing_measure()?;
            let qcfg = quad_cfg(tol)?;
            let law = mean_law(&mu, n, &qcfg)?;
            let summary = serde_json::json!({
                "config": urn,
                "mixing_measure": mu.to_string(),
                "tv_distance": tv_distance(&emp, &law)?,
                "empirical_dw": empirical_dw(&emp, &mu)?,
                "dw_exact": dw_mean_vs_prior(&law, &mu)?,
                "empirical_mean": emp.mean(),
                "exact_mean": law.mean(),
            });
            write_out(&out, &emp.to_csv(&csv_metadata(&urn)))?;
            println!("{}", serde_json::to_string_pretty(&summary)?);
        }
        Cmd::ChenCheck { t_grid, n_grid, out } => {
            let ts = t_grid.unwrap_or_else(|| (1..=9).map(|i| i as f64 / 10.0).collect());
            let ns = n_grid.unwrap_or_else(|| vec![1, 4, 16, 64, 256]);
            let mut rows = Vec::new();
            for &t in &ts {
                for &n in &ns {
                    let (lhs, rhs) = chen_bound_check(t, n)?;
                    rows.push(ChenRow {
                        t,
                        n,
                        lhs,
                        rhs,
                        margin: rhs - lhs,
                    });
                }
            }
            let mut csv = String::from("t,n,lhs,rhs,margin\n");
            for r in &rows {
                csv.push_str(&format!(
                    "{},{},{},{},{}\n",
                    r.t, r.n, r.lhs, r.rhs, r.margin
                ));
            }
            write_out(&out, &csv)?;
            println!("{}", serde_json::to_string_pretty(&rows)?);
            if rows.iter().any(|r| r.margin < 0.0) {
                bail!("normal-approximation bound violated on the grid");
            }
        }
        Cmd::Verify { seed, tol, out } => {
            let report = verify_full_suite(&quad_cfg(tol)?, seed)?;
            let json = report.to_json();
            write_out(&out, &json)?;
            print!("{json}");
            if !report.all_pass() {
                std::process::exit(1);
            }
        }
    }
    Ok(())
}
