//! Distances between the law of X̄ₙ and its mixing measure.
//!
//! On ℝ the Wasserstein-1 distance is ∫ |F_X − F_Y| dx and the Kolmogorov
//! distance is sup |F_X − F_Y|. F_law is a step function with jumps at k/n,
//! so d_W decomposes over cells [k/n, (k+1)/n]: on each cell F_law is a
//! constant c and F_μ is monotone, hence |F_μ − c| changes sign at most once.
//! The crossing is bisected to 1e-13 and each signed piece is integrated
//! exactly through partial_mean, making the distance exact up to
//! special-function accuracy rather than grid-limited.

use crate::bounds::bound_constants;
use crate::error::{Error, Result};
use crate::exact_law::{mean_law, ExactMeanLaw};
use crate::measure::MixingMeasure;
use crate::quadrature::{gk_adaptive, QuadratureConfig};
use crate::special::{
    log_choose, ncdf_integral_raw, ncdf_raw, ntail_integral_raw, Accuracy,
};
use serde::Serialize;
use std::cell::RefCell;

const CROSSING_WIDTH: f64 = 1e-13;
const MAX_BISECT: u32 = 200;

/// Abscissa where the monotone F_μ crosses level c inside (lo, hi);
/// F_μ(lo) and F_μ(hi⁻) straddle c and F_μ is continuous on the interval.
fn bisect_crossing(mu: &MixingMeasure, c: f64, mut lo: f64, mut hi: f64) -> Result<f64> {
    let below_at_lo = mu.cdf(lo)? < c;
    let mut iter = 0;
    while hi - lo > CROSSING_WIDTH {
        if iter >= MAX_BISECT {
            return Err(Error::Bisection { lo, hi });
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // f64 resolution
        }
        if (mu.cdf(mid)? < c) == below_at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
        iter += 1;
    }
    Ok(0.5 * (lo + hi))
}

/// ∫ₐᵇ F_μ(x) dx, exact: b F(b) − a F(a) − ∫_(a,b] x μ(dx).
/// The half-open partial-mean convention makes atoms at either endpoint
/// cancel correctly.
fn cdf_integral(mu: &MixingMeasure, a: f64, b: f64) -> Result<f64> {
    Ok(b * mu.cdf(b)? - a * mu.cdf(a)? - mu.partial_mean(a, b)?)
}

/// ∫ over one atom-free piece (a,b) of |F_μ − c|, where F_μ is continuous
/// and monotone on the piece.
fn piece_l1(mu: &MixingMeasure, c: f64, a: f64, b: f64) -> Result<f64> {
    let fa = mu.cdf(a)? - c;
    let fb = mu.cdf_left(b)? - c;
    if fa == 0.0 && fb == 0.0 {
        // monotone between equal endpoint values: identically c, exactly 0
        return Ok(0.0);
    }
    if fa * fb >= 0.0 {
        // one sign on the whole piece
        return Ok((cdf_integral(mu, a, b)? - c * (b - a)).abs());
    }
    let m = bisect_crossing(mu, c, a, b)?;
    Ok((cdf_integral(mu, a, m)? - c * (m - a)).abs()
        + (cdf_integral(mu, m, b)? - c * (b - m)).abs())
}

/// d_W between the step law (probs[k] at k/n) and μ.
pub(crate) fn dw_step_vs_measure(n: u32, probs: &[f64], mu: &MixingMeasure) -> Result<f64> {
    debug_assert_eq!(probs.len(), n as usize + 1);
    let nf = n as f64;
    let atoms = mu.atoms();
    let mut cum = 0.0;
    let mut total = 0.0;
    for k in 0..n {
        cum += probs[k as usize];
        let a = k as f64 / nf;
        let b = (k + 1) as f64 / nf;
        // split the cell at interior atoms of μ so each piece is continuous
        let mut edges = vec![a];
        for &(loc, _) in &atoms {
            if loc > a && loc < b {
                edges.push(loc);
            }
        }
        edges.push(b);
        for w in edges.windows(2) {
            total += piece_l1(mu, cum, w[0], w[1])?;
        }
    }
    Ok(total)
}

/// d_K between the step law and μ: the supremum is attained at a cell edge
/// or an atom of μ, from one side or the other (F_μ is monotone within each
/// atom-free piece, F_law constant there).
pub(crate) fn dk_step_vs_measure(n: u32, probs: &[f64], mu: &MixingMeasure) -> Result<f64> {
    let nf = n as f64;
    let mut cum = Vec::with_capacity(probs.len());
    let mut s = 0.0;
    for &p in probs {
        s += p;
        cum.push(s);
    }
    // right-continuous step CDF and its left limit
    let step = |x: f64| -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        let mut k = ((x * nf).floor() as i64).clamp(0, n as i64) as u32;
        while k + 1 <= n && (k + 1) as f64 / nf <= x {
            k += 1;
        }
        while k > 0 && k as f64 / nf > x {
            k -= 1;
        }
        if k as f64 / nf > x {
            0.0
        } else {
            cum[k as usize]
        }
    };
    let step_left = |x: f64| -> f64 {
        let k = (x * nf).round() as i64;
        if (0..=n as i64).contains(&k) && k as f64 / nf == x {
            // prefix sum, not cum[k] - probs[k]: subtraction would reinject
            // the rounding error of the last addition
            if k == 0 { 0.0 } else { cum[k as usize - 1] }
        } else {
            step(x)
        }
    };
    let mut candidates: Vec<f64> = (0..=n).map(|k| k as f64 / nf).collect();
    candidates.extend(mu.atoms().iter().map(|&(loc, _)| loc));
    candidates.push(0.0);
    candidates.push(1.0);
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    let mut best: f64 = 0.0;
    for &t in &candidates {
        best = best.max((step(t) - mu.cdf(t)?).abs());
        best = best.max((step_left(t) - mu.cdf_left(t)?).abs());
    }
    Ok(best)
}

/// d_W(X̄ₙ, θ) from the exact law.
pub fn dw_mean_vs_prior(law: &ExactMeanLaw, mu: &MixingMeasure) -> Result<f64> {
    dw_step_vs_measure(law.n, &law.probs, mu)
}

/// d_K(X̄ₙ, θ) from the exact law.
pub fn dk_mean_vs_prior(law: &ExactMeanLaw, mu: &MixingMeasure) -> Result<f64> {
    dk_step_vs_measure(law.n, &law.probs, mu)
}

/// d_W(θ + √(θ(1−θ)/n) Z, θ): the Gaussian-perturbed prior against the
/// prior. The perturbed CDF is G(x) = E_μ[F_Z(√n (x−θ)/f(θ))]; the outer
/// integral ∫|G − F_μ| runs over the support widened by 8 half-widths
/// (σ_max = 1/(2√n)) and is then extended in steps of 4/√n until a step
/// contributes less than a tenth of the absolute tolerance.
pub fn dw_perturbed_prior(mu: &MixingMeasure, n: u32, cfg: &QuadratureConfig) -> Result<f64> {
    if n < 1 {
        return Err(Error::OutOfDomain {
            op: "dw_perturbed_prior",
            name: "n",
            value: n as f64,
            constraint: ">= 1",
        });
    }
    cfg.validate()?;
    let q = mu.boundary_mass();
    if q != 0.0 {
        return Err(Error::OutOfDomain {
            op: "dw_perturbed_prior",
            name: "mu({0,1})",
            value: q,
            constraint: "= 0 (perturbation scale vanishes at the boundary)",
        });
    }
    let rn = (n as f64).sqrt();
    let acc = cfg.accuracy;
    // inner expectation tolerance: pollution of the outer integral is at
    // most (outer range) * inner_tol, kept a factor ~10 under acc.abs_tol
    let inner_cfg = QuadratureConfig {
        accuracy: Accuracy {
            abs_tol: (acc.abs_tol * 0.02).max(1e-15),
            rel_tol: acc.rel_tol,
        },
        ..*cfg
    };
    let perturbed_cdf = |x: f64| -> Result<f64> {
        mu.expect(
            &|t: f64| {
                if t <= 0.0 {
                    return if x > 0.0 { 1.0 } else { 0.0 };
                }
                if t >= 1.0 {
                    return if x > 1.0 { 1.0 } else { 0.0 };
                }
                ncdf_raw(rn * (x - t) / (t * (1.0 - t)).sqrt())
            },
            &[x],
            &inner_cfg,
        )
    };

    // |G - F| through an infallible closure for the adaptive driver; first
    // inner error is stashed and re-raised afterwards
    let stash: RefCell<Option<Error>> = RefCell::new(None);
    let abs_diff = |x: f64| -> f64 {
        let d = perturbed_cdf(x).and_then(|g| Ok(g - mu.cdf(x)?));
        match d {
            Ok(v) => v.abs(),
            Err(e) => {
                stash.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };
    let raise = |r: Result<f64>| -> Result<f64> {
        if let Some(e) = stash.borrow_mut().take() {
            return Err(e);
        }
        r
    };

    let (lo, hi) = mu.support();
    let sigma_max = 0.5 / rn;
    let a0 = lo - 8.0 * sigma_max;
    let b0 = hi + 8.0 * sigma_max;
    let mut pts = vec![a0, lo, hi, b0];
    for &(loc, _) in &mu.atoms() {
        pts.push(loc);
    }
    for m in [0.0, 0.5, 1.0] {
        if m > a0 && m < b0 {
            pts.push(m);
        }
    }
    pts.retain(|&x| (a0..=b0).contains(&x));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut total = raise(gk_adaptive(&abs_diff, &pts, acc, cfg.max_subdivisions))?;

    // tail extension rule: 4/√n steps until a step is negligible
    let step = 4.0 / rn;
    let tail_acc = Accuracy {
        abs_tol: acc.abs_tol / 10.0,
        rel_tol: acc.rel_tol,
    };
    for dir in [-1.0, 1.0] {
        let mut edge = if dir < 0.0 { a0 } else { b0 };
        for _ in 0..256 {
            let next = edge + dir * step;
            let (a, b) = if dir < 0.0 { (next, edge) } else { (edge, next) };
            let piece = raise(gk_adaptive(&abs_diff, &[a, b], tail_acc, cfg.max_subdivisions))?;
            total += piece;
            edge = next;
            if piece < acc.abs_tol / 10.0 {
                break;
            }
        }
    }
    Ok(total)
}

/// Duality lower bound for d_W(X̄ₙ, θ) from the 1-Lipschitz test function
/// ψ(x) = x(x−1) on [0,1]: returns E[ψ(X̄ₙ)] − E[ψ(θ)], which equals
/// E[θ(1−θ)]/n exactly (conditional-variance identity), so the lower bound
/// is an identity rather than an estimate.
pub fn dual_lower_bound_psi(law: &ExactMeanLaw, mu: &MixingMeasure) -> Result<f64> {
    // E[ψ(X̄)] = E[X̄²] − E[X̄]; E[ψ(θ)] = E[θ²] − E[θ] = −E[θ(1−θ)]
    Ok(law.second_moment() - law.mean() + mu.moment_theta_one_minus_theta()?)
}

/// Duality lower bound for the perturbed-prior distance from ψ(x) = |x−1/2|:
/// E[ψ(θ + f(θ)Z/√n)] − E[ψ(θ)]. With a = (θ−1/2)√n/f(θ) the inner
/// difference is (f/√n)(E|a+Z| − |a|) = (2f(θ)/√n) ∫_{|a|}^∞ F_Z(−u) du,
/// evaluated through the closed Gaussian tail integral.
pub fn dual_lower_bound_abs(mu: &MixingMeasure, n: u32) -> Result<f64> {
    if n < 1 {
        return Err(Error::OutOfDomain {
            op: "dual_lower_bound_abs",
            name: "n",
            value: n as f64,
            constraint: ">= 1",
        });
    }
    let q = mu.boundary_mass();
    if q != 0.0 {
        return Err(Error::OutOfDomain {
            op: "dual_lower_bound_abs",
            name: "mu({0,1})",
            value: q,
            constraint: "= 0",
        });
    }
    let rn = (n as f64).sqrt();
    mu.expect(
        &|t: f64| {
            if t <= 0.0 || t >= 1.0 {
                return 0.0;
            }
            let f = (t * (1.0 - t)).sqrt();
            let a = ((t - 0.5) * rn / f).abs();
            2.0 * f / rn * ntail_integral_raw(a)
        },
        &[0.5],
        &QuadratureConfig::default(),
    )
}

/// Wasserstein Berry-Esseen check for the standardized Binomial mean:
/// lhs = d_W(√n Ȳₙ, Z) where Ȳₙ is the centered scaled Binomial(n,t) mean
/// living on z_k = (k−nt)/√(nt(1−t)); rhs = (t² + (1−t)²)/√(n t(1−t)).
/// The bound lhs ≤ rhs holds for all 0 < t < 1, n ≥ 1.
pub fn chen_bound_check(t: f64, n: u32) -> Result<(f64, f64)> {
    if !(t.is_finite() && t > 0.0 && t < 1.0) {
        return Err(Error::OutOfDomain {
            op: "chen_bound_check",
            name: "t",
            value: t,
            constraint: "in (0, 1)",
        });
    }
    if n < 1 {
        return Err(Error::OutOfDomain {
            op: "chen_bound_check",
            name: "n",
            value: n as f64,
            constraint: ">= 1",
        });
    }
    let nf = n as f64;
    let s = (nf * t * (1.0 - t)).sqrt();
    let z = |k: u32| (k as f64 - nf * t) / s;
    let lt = t.ln();
    let l1t = (-t).ln_1p();
    let pmf = |k: u32| (log_choose(n, k) + k as f64 * lt + (nf - k as f64) * l1t).exp();

    // left tail: ∫_{−∞}^{z₀} F_Z = z₀ F_Z(z₀) + ω(z₀)
    let z0 = z(0);
    let mut lhs = z0 * ncdf_raw(z0) + crate::special::npdf_raw(z0);
    // right tail: ∫_{z_n}^{∞} (1 − F_Z)
    lhs += ntail_integral_raw(z(n));

    let mut cum = 0.0;
    for k in 0..n {
        cum += pmf(k);
        let (a, b) = (z(k), z(k + 1));
        let fa = ncdf_raw(a) - cum;
        let fb = ncdf_raw(b) - cum;
        if fa * fb >= 0.0 {
            lhs += (ncdf_integral_raw(a, b) - cum * (b - a)).abs();
        } else {
            // single crossing of the monotone F_Z with the level
            let (mut lo, mut hi) = (a, b);
            let below_at_lo = fa < 0.0;
            while hi - lo > CROSSING_WIDTH {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if (ncdf_raw(mid) < cum) == below_at_lo {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let m = 0.5 * (lo + hi);
            lhs += (ncdf_integral_raw(a, m) - cum * (m - a)).abs();
            lhs += (ncdf_integral_raw(m, b) - cum * (b - m)).abs();
        }
    }
    let rhs = (t * t + (1.0 - t) * (1.0 - t)) / s;
    Ok((lhs, rhs))
}

/// All distances and bounds for one (μ, n) pair.
#[derive(Debug, Clone, Serialize)]
pub struct DistanceReport {
    pub n: u32,
    /// d_W(X̄ₙ, θ); present in exact modes.
    pub dw_exact: Option<f64>,
    /// d_K(X̄ₙ, θ); present in exact modes.
    pub dk: Option<f64>,
    /// d_W(θ + √(θ(1−θ)/n) Z, θ); present in perturbed modes.
    pub dw_perturbed: Option<f64>,
    /// C₁/n = E[θ(1−θ)]/n.
    pub lower_bound: f64,
    /// √(E[θ(1−θ)]/n).
    pub upper_crude: f64,
    /// C₂/n; absent when μ has no density or the |p′| integral diverges.
    pub upper_smooth: Option<f64>,
    /// E[θ² + (1−θ)²]/n, bounding |dw_exact − dw_perturbed|.
    pub equivalence_gap_bound: f64,
    /// Lower bound from the ψ(x)=x(x−1) duality; equals lower_bound exactly.
    pub dual_lower_psi: Option<f64>,
}

/// Compute a DistanceReport. Exact-law distances and the perturbed distance
/// are each optional (they dominate the cost); bounds are always filled.
/// upper_smooth is None when the measure has no density or its |p′| integral
/// diverges; any other failure propagates.
pub fn distance_report(
    mu: &MixingMeasure,
    n: u32,
    cfg: &QuadratureConfig,
    want_exact: bool,
    want_perturbed: bool,
) -> Result<DistanceReport> {
    let nf = n as f64;
    let m11 = mu.moment_theta_one_minus_theta()?;
    let m2pc = mu.moment_sq_plus_comp_sq()?;
    let upper_smooth = match bound_constants(mu, cfg) {
        Ok(c) => Some(c.c2 / nf),
        Err(Error::NoDensity { .. }) | Err(Error::DivergentIntegral { .. }) => None,
        Err(e) => return Err(e),
    };
    let (dw_exact, dk, dual_lower_psi) = if want_exact {
        let law = mean_law(mu, n, cfg)?;
        (
            Some(dw_mean_vs_prior(&law, mu)?),
            Some(dk_mean_vs_prior(&law, mu)?),
            Some(dual_lower_bound_psi(&law, mu)?),
        )
    } else {
        (None, None, None)
    };
    let dw_perturbed = if want_perturbed {
        Some(dw_perturbed_prior(mu, n, cfg)?)
    } else {
        None
    };
    Ok(DistanceReport {
        n,
        dw_exact,
        dk,
        dw_perturbed,
        lower_bound: m11 / nf,
        upper_crude: (m11 / nf).sqrt(),
        upper_smooth,
        equivalence_gap_bound: m2pc / nf,
        dual_lower_psi,
    })
}

/// Check every inequality the report is supposed to satisfy; returns one
/// human-readable violation per failed inequality (empty = all hold).
/// `budget` is the quadrature slack granted to the two inequalities whose
/// sides are both computed numerically (equivalence gap, smooth upper bound);
/// the sandwich, Kolmogorov, and duality inequalities are checked strictly.
pub fn check_report_invariants(r: &DistanceReport, budget: f64) -> Vec<String> {
    let mut out = Vec::new();
    let mut fail = |name: &str, lhs: f64, rhs: f64| {
        out.push(format!("{name} violated: {lhs} > {rhs}"));
    };
    if let Some(dw) = r.dw_exact {
        if r.lower_bound > dw {
            fail("lower_bound <= dw_exact", r.lower_bound, dw);
        }
        if dw > r.upper_crude {
            fail("dw_exact <= upper_crude", dw, r.upper_crude);
        }
        if let Some(dk) = r.dk {
            if dw > dk {
                fail("dw_exact <= dk", dw, dk);
            }
        }
        if let Some(us) = r.upper_smooth {
            if dw > us + budget {
                fail("dw_exact <= upper_smooth", dw, us + budget);
            }
        }
        if let Some(psi) = r.dual_lower_psi {
            if psi > dw {
                fail("dual_lower_psi <= dw_exact", psi, dw);
            }
        }
        if let Some(dwp) = r.dw_perturbed {
            if (dw - dwp).abs() > r.equivalence_gap_bound + budget {
                fail(
                    "|dw_exact - dw_perturbed| <= equivalence_gap_bound",
                    (dw - dwp).abs(),
                    r.equivalence_gap_bound + budget,
                );
            }
        }
    }
    out
}
