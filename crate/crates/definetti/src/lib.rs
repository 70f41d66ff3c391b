//! Exact distributional analysis of the empirical mean of an exchangeable
//! Bernoulli sequence.
//!
//! An infinite exchangeable 0/1 sequence is a Bernoulli(θ) i.i.d. sequence
//! with θ drawn once from a mixing measure μ on [0, 1]; the empirical mean
//! X̄ₙ converges in law to μ. This crate computes the exact law of X̄ₙ, the
//! Wasserstein and Kolmogorov distances between that law and its limit, the
//! matching Gaussian-perturbed prior θ + √(θ(1−θ)/n)·Z, and the explicit
//! constants in the two-sided 1/n rate bounds, along with Monte Carlo urn
//! simulation for cross-validation.

pub mod error;
pub mod special;
pub mod quadrature;
mod smooth;
pub mod measure;
pub mod bounds;
pub mod exact_law;
pub mod wasserstein;
pub mod urn;

pub use error::{Error, Result};
pub use special::{
    beta_fn, beta_inc, beta_inc_regularized, fluctuation_scale, log_beta_fn, log_gamma,
    normal_cdf, normal_pdf, normal_tail, Accuracy,
};
pub use quadrature::{QuadratureConfig, Scheme};
pub use smooth::SmoothTable;
pub use measure::{MixingMeasure, MixtureComponent};
pub use bounds::{
    beta_abs_linear_moment, bound_constants, bound_constants_quadrature, BoundConstants,
    ConstantsMethod,
};
pub use exact_law::{mean_law, ExactMeanLaw};
pub use wasserstein::{
    chen_bound_check, check_report_invariants, distance_report, dk_mean_vs_prior,
    dual_lower_bound_abs, dual_lower_bound_psi, dw_mean_vs_prior, dw_perturbed_prior,
    DistanceReport,
};
pub use urn::{
    bootstrap_dw_se, csv_metadata, empirical_dk, empirical_dw, simulate_exchangeable,
    simulate_urn, tv_distance, EmpiricalLaw, UrnConfig,
};
