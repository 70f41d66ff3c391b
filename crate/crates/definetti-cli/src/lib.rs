//! Orchestration layer over the definetti library: distance curves, rate
//! fitting, the verification suite, and CSV/JSON report plumbing.

pub mod rates;
pub mod runner;
pub mod verify;

pub use rates::{exact_rate_grid, fit_rate, log_grid, perturbed_rate_grid, RateFit};
pub use runner::{
    compare_constant, law_to_csv, monotonicity_warnings, reports_to_csv, run_distance_curve,
    Mode, RunConfig,
};
pub use verify::{verify_full_suite, CheckOutcome, Status, VerifyReport};
