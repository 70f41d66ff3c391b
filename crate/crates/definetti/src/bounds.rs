//! Constants (C₁, C₂) in the two-sided 1/n rate bound
//!   C₁/n ≤ d_W(X̄ₙ, θ) ≤ C₂/n,
//! where C₁ = E[θ(1−θ)] and
//!   C₂ = ∫ (|1−2u| + u² + (1−u)²) p(u) du + ∫ u(1−u)|p′(u)| du + 3/√(2πe).
//! For Beta priors every term has a closed form through E|aθ + b|; for other
//! densities the terms are integrated numerically, and a genuinely divergent
//! |p′| integral is detected and reported rather than returned as a large
//! number.

use crate::error::{Error, Result};
use crate::measure::{beta_expect, MixingMeasure};
use crate::quadrature::{
    gk_adaptive, ts_with_divergence_check, QuadratureConfig, Scheme,
};
use crate::special::{beta_inc_regularized, THREE_OVER_SQRT_2PI_E};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantsMethod {
    ClosedForm,
    Quadrature,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundConstants {
    /// E[θ(1−θ)]; lower-bound constant, always ≤ 1/4.
    pub c1: f64,
    /// Upper-bound constant; always ≥ 3/√(2πe).
    pub c2: f64,
    /// Closed-form Beta value of c2, when the Beta route was taken.
    pub c_alpha_beta: Option<f64>,
    pub method: ConstantsMethod,
}

/// E|aθ + b| for θ ~ Beta(α, β), in closed form via incomplete-beta values.
///
/// Reductions: a = 0 gives |b|; a < 0 flips to (−a, −b). For a > 0 the sign
/// of aθ + b changes at r = −b/a, which lies in [0, 1) exactly when
/// −a < b ≤ 0; then with E = α/(α+β),
///   E|aθ + b| = aE(1 − 2 I_r(α+1, β)) + b(1 − 2 I_r(α, β)),
/// since ∫₀^r θ p(θ) dθ = E · I_r(α+1, β). Outside that window the argument
/// keeps one sign and the expectation is ±(aE + b).
pub fn beta_abs_linear_moment(alpha: f64, beta: f64, a: f64, b: f64) -> Result<f64> {
    for (name, v) in [("alpha", alpha), ("beta", beta)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::OutOfDomain {
                op: "beta_abs_linear_moment",
                name,
                value: v,
                constraint: "finite and > 0",
            });
        }
    }
    for (name, v) in [("a", a), ("b", b)] {
        if !v.is_finite() {
            return Err(Error::OutOfDomain {
                op: "beta_abs_linear_moment",
                name,
                value: v,
                constraint: "finite",
            });
        }
    }
    if a == 0.0 {
        return Ok(b.abs());
    }
    if a < 0.0 {
        return beta_abs_linear_moment(alpha, beta, -a, -b);
    }
    let mean = alpha / (alpha + beta);
    if b > 0.0 {
        return Ok(a * mean + b);
    }
    if b <= -a {
        return Ok(-(a * mean + b));
    }
    let r = -b / a;
    let i_shift = beta_inc_regularized(r, alpha + 1.0, beta)?;
    let i_plain = beta_inc_regularized(r, alpha, beta)?;
    Ok(a * mean * (1.0 - 2.0 * i_shift) + b * (1.0 - 2.0 * i_plain))
}

/// ∫ u(1−u) |p′(u)| du for the density kinds. Beta reduces to a bounded
/// expectation because u(1−u) p′(u) = p(u)((α−1) − (α+β−2)u); the power-law
/// integrand grows like (u−1/2)^{γ−2} and is reported divergent.
fn abs_derivative_weighted_integral(
    mu: &MixingMeasure,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    const WHAT: &str = "int u(1-u)|p'(u)| du";
    let acc = cfg.accuracy;
    match mu {
        MixingMeasure::Beta { alpha, beta } => {
            let slope = alpha + beta - 2.0;
            let g = |u: f64| (alpha - 1.0 - slope * u).abs();
            let hints: &[f64] = &if slope != 0.0 {
                vec![(alpha - 1.0) / slope]
            } else {
                vec![]
            };
            beta_expect(*alpha, *beta, &g, hints, acc, cfg.ts_levels())
        }
        MixingMeasure::PowerLaw { gamma } => {
            let c_p = gamma * libm::exp2(2.0 * gamma);
            let f = |x: f64, da: f64, _db: f64| {
                // da is the exact distance to the singular endpoint 1/2
                x * (1.0 - x) * c_p * (1.0 - gamma) * da.powf(gamma - 2.0)
            };
            ts_with_divergence_check(&f, &[0.5, 0.75], acc, cfg.ts_levels(), WHAT)
        }
        MixingMeasure::SmoothDensity(t) => {
            let mut pts: Vec<f64> = t.nodes().to_vec();
            pts.extend(derivative_sign_roots(mu, t.nodes()));
            pts.sort_by(f64::total_cmp);
            pts.dedup();
            let f = |x: f64| x * (1.0 - x) * t.derivative(x).abs();
            match cfg.scheme {
                Scheme::GaussKronrodAdaptive => {
                    gk_adaptive(f, &pts, acc, cfg.max_subdivisions)
                }
                Scheme::TanhSinh => ts_with_divergence_check(
                    &|x, _, _| f(x),
                    &pts,
                    acc,
                    cfg.ts_levels(),
                    WHAT,
                ),
            }
        }
        MixingMeasure::Mixture { components } => {
            // |Σ wᵢ pᵢ′| needs the combined derivative pointwise; component
            // breakpoints and sign hints seed the partition, adaptivity does
            // the rest
            let mut pts = vec![0.0, 1.0];
            for c in components {
                let (lo, hi) = c.measure.support();
                pts.push(lo);
                pts.push(hi);
                if let MixingMeasure::SmoothDensity(t) = &c.measure {
                    pts.extend_from_slice(t.nodes());
                }
            }
            pts.retain(|&x| (0.0..=1.0).contains(&x));
            pts.sort_by(f64::total_cmp);
            pts.dedup();
            let f = |x: f64, _da: f64, _db: f64| {
                match mu.density_derivative_at(x) {
                    Some(dp) => x * (1.0 - x) * dp.abs(),
                    None => f64::NAN,
                }
            };
            ts_with_divergence_check(&f, &pts, acc, cfg.ts_levels(), WHAT)
        }
        MixingMeasure::Atomic { .. } => Err(Error::NoDensity {
            op: "abs_derivative_weighted_integral",
        }),
    }
}

/// Sign-change points of the tabulated derivative between nodes.
fn derivative_sign_roots(mu: &MixingMeasure, nodes: &[f64]) -> Vec<f64> {
    let mut roots = Vec::new();
    for w in nodes.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (da, db) = (
            mu.density_derivative_at(a + (b - a) * 1e-12).unwrap_or(0.0),
            mu.density_derivative_at(b - (b - a) * 1e-12).unwrap_or(0.0),
        );
        if da * db < 0.0 {
            // derivative is linear on the segment
            roots.push(a + (b - a) * da / (da - db));
        }
    }
    roots
}

/// Bound constants for μ. Beta priors get the fully closed form
///   C_{α,β} = E[θ²+(1−θ)²] + E|2θ−1| + E|(α+β−2)θ + (1−α)| + 3/√(2πe)
/// (the last expectation is the |p′| term); every other density kind goes
/// through quadrature. Measures with atoms are rejected: C₂ needs a density.
pub fn bound_constants(mu: &MixingMeasure, cfg: &QuadratureConfig) -> Result<BoundConstants> {
    cfg.validate()?;
    match mu {
        MixingMeasure::Beta { alpha, beta } => {
            let s = alpha + beta;
            let c1 = alpha * beta / (s * (s + 1.0));
            let m2pc = (alpha * (alpha + 1.0) + beta * (beta + 1.0)) / (s * (s + 1.0));
            let t_abs = beta_abs_linear_moment(*alpha, *beta, 2.0, -1.0)?;
            let t_dp = beta_abs_linear_moment(*alpha, *beta, s - 2.0, 1.0 - alpha)?;
            let c2 = m2pc + t_abs + t_dp + THREE_OVER_SQRT_2PI_E;
            Ok(BoundConstants {
                c1,
                c2,
                c_alpha_beta: Some(c2),
                method: ConstantsMethod::ClosedForm,
            })
        }
        _ => bound_constants_quadrature(mu, cfg),
    }
}

/// The generic quadrature route for the same constants, usable for any
/// density measure (including Beta, as an independent cross-check of the
/// closed form).
pub fn bound_constants_quadrature(
    mu: &MixingMeasure,
    cfg: &QuadratureConfig,
) -> Result<BoundConstants> {
    cfg.validate()?;
    if !mu.has_density() {
        return Err(Error::NoDensity {
            op: "bound_constants",
        });
    }
    let c1 = mu.expect(&|u| u * (1.0 - u), &[], cfg)?;
    let term1 = mu.expect(
        &|u| (1.0 - 2.0 * u).abs() + u * u + (1.0 - u) * (1.0 - u),
        &[0.5],
        cfg,
    )?;
    let term2 = abs_derivative_weighted_integral(mu, cfg)?;
    Ok(BoundConstants {
        c1,
        c2: term1 + term2 + THREE_OVER_SQRT_2PI_E,
        c_alpha_beta: None,
        method: ConstantsMethod::Quadrature,
    })
}
