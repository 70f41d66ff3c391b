//! Scalar special functions: Gaussian density/CDF/tail, log-gamma, and the
//! (incomplete) Beta family. Everything here is pure and thread-safe.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// 1/sqrt(2*pi)
pub const INV_SQRT_2PI: f64 = 0.39894228040143267794;
/// 3/sqrt(2*pi*e), the Gaussian-tail constant appearing in the smooth upper bound.
pub const THREE_OVER_SQRT_2PI_E: f64 = 0.72591217355743004939;

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Absolute/relative tolerance pair driving every iterative routine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Accuracy {
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Default for Accuracy {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
        }
    }
}

impl Accuracy {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Result<Self> {
        for (name, v) in [("abs_tol", abs_tol), ("rel_tol", rel_tol)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::OutOfDomain {
                    op: "Accuracy::new",
                    name,
                    value: v,
                    constraint: "> 0 and finite",
                });
            }
        }
        Ok(Self { abs_tol, rel_tol })
    }

    /// max(abs_tol, rel_tol * |scale|): the target for a quantity of the given magnitude.
    pub fn target(&self, scale: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * scale.abs())
    }
}

fn require_finite(op: &'static str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite { op, value: x })
    }
}

#[inline]
pub(crate) fn npdf_raw(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

#[inline]
pub(crate) fn ncdf_raw(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

#[inline]
pub(crate) fn ntail_raw(x: f64) -> f64 {
    0.5 * libm::erfc(x / SQRT_2)
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> Result<f64> {
    require_finite("normal_pdf", x)?;
    Ok(npdf_raw(x))
}

/// Standard normal CDF, via erfc so both tails keep full relative accuracy.
pub fn normal_cdf(x: f64) -> Result<f64> {
    require_finite("normal_cdf", x)?;
    Ok(ncdf_raw(x))
}

/// Upper tail G(t) = 1 - F_Z(t), computed directly (never as 1 - cdf).
pub fn normal_tail(t: f64) -> Result<f64> {
    require_finite("normal_tail", t)?;
    Ok(ntail_raw(t))
}

/// Integral of the upper tail: int_y^inf G(u) du = pdf(y) - y * G(y).
/// Nonnegative and decreasing in y; underflows to 0 beyond y ~ 38.
#[inline]
pub(crate) fn ntail_integral_raw(y: f64) -> f64 {
    let v = npdf_raw(y) - y * ntail_raw(y);
    v.max(0.0)
}

/// int_a^b F_Z(x) dx without cancellation: on the right half it is rewritten
/// through tail integrals so the result stays accurate when F_Z is ~1.
pub(crate) fn ncdf_integral_raw(a: f64, b: f64) -> f64 {
    debug_assert!(a <= b);
    // antiderivative x*F_Z(x) + pdf(x), which -> 0 as x -> -inf
    let left = |x: f64| x * ncdf_raw(x) + npdf_raw(x);
    if b <= 0.0 {
        left(b) - left(a)
    } else if a >= 0.0 {
        (b - a) - (ntail_integral_raw(a) - ntail_integral_raw(b))
    } else {
        (left(0.0) - left(a)) + (b - (ntail_integral_raw(0.0) - ntail_integral_raw(b)))
    }
}

/// ln Gamma(x) for x > 0.
pub fn log_gamma(x: f64) -> Result<f64> {
    require_finite("log_gamma", x)?;
    if x <= 0.0 {
        return Err(Error::OutOfDomain {
            op: "log_gamma",
            name: "x",
            value: x,
            constraint: "> 0",
        });
    }
    Ok(libm::lgamma(x))
}

fn check_beta_params(op: &'static str, alpha: f64, beta: f64) -> Result<()> {
    for (name, v) in [("alpha", alpha), ("beta", beta)] {
        require_finite(op, v)?;
        if v <= 0.0 {
            return Err(Error::OutOfDomain {
                op,
                name,
                value: v,
                constraint: "> 0",
            });
        }
    }
    Ok(())
}

/// ln B(alpha, beta). Safe for parameters up to 1e3 and far beyond.
pub fn log_beta_fn(alpha: f64, beta: f64) -> Result<f64> {
    check_beta_params("log_beta_fn", alpha, beta)?;
    Ok(libm::lgamma(alpha) + libm::lgamma(beta) - libm::lgamma(alpha + beta))
}

/// B(alpha, beta). May underflow to subnormal/zero for large parameters
/// (B(1000,1000) ~ e^-1388); use [`log_beta_fn`] when that matters.
pub fn beta_fn(alpha: f64, beta: f64) -> Result<f64> {
    Ok(log_beta_fn(alpha, beta)?.exp())
}

/// Lentz continued fraction for the regularized incomplete beta.
/// Converges for x below the a/(a+b) symmetry switch; callers arrange that.
fn beta_cf(x: f64, a: f64, b: f64) -> Result<f64> {
    const MAX_ITER: usize = 200;
    const EPS: f64 = 1e-15;
    const TINY: f64 = 1e-30;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            return Ok(h);
        }
    }
    Err(Error::ContinuedFraction {
        x,
        a,
        b,
        iterations: MAX_ITER,
    })
}

/// Regularized incomplete beta I_x(a, b) in [0, 1].
pub fn beta_inc_regularized(x: f64, alpha: f64, beta: f64) -> Result<f64> {
    check_beta_params("beta_inc_regularized", alpha, beta)?;
    require_finite("beta_inc_regularized", x)?;
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfDomain {
            op: "beta_inc_regularized",
            name: "x",
            value: x,
            constraint: "in [0, 1]",
        });
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    // prefactor x^a (1-x)^b / (a B(a,b)), assembled in log space
    let front = |x: f64, a: f64, b: f64| -> Result<f64> {
        Ok((a * x.ln() + b * (-x).ln_1p() - a.ln() - log_beta_fn(a, b)?).exp())
    };
    if x <= alpha / (alpha + beta) {
        Ok(front(x, alpha, beta)? * beta_cf(x, alpha, beta)?)
    } else {
        Ok(1.0 - front(1.0 - x, beta, alpha)? * beta_cf(1.0 - x, beta, alpha)?)
    }
}

/// Unregularized incomplete beta B_i(x, a, b) = int_0^x t^(a-1) (1-t)^(b-1) dt.
/// Monotone in x with B_i(1, a, b) = B(a, b). Like [`beta_fn`] the value itself
/// can underflow f64 for extreme parameters; the regularized form does not.
pub fn beta_inc(x: f64, alpha: f64, beta: f64) -> Result<f64> {
    check_beta_params("beta_inc", alpha, beta)?;
    require_finite("beta_inc", x)?;
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfDomain {
            op: "beta_inc",
            name: "x",
            value: x,
            constraint: "in [0, 1]",
        });
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return beta_fn(alpha, beta);
    }
    if x <= alpha / (alpha + beta) {
        // x^a (1-x)^b / a * CF, no B(a,b) needed on the direct branch
        let front = (alpha * x.ln() + beta * (-x).ln_1p() - alpha.ln()).exp();
        Ok(front * beta_cf(x, alpha, beta)?)
    } else {
        Ok(beta_fn(alpha, beta)? - beta_inc(1.0 - x, beta, alpha)?)
    }
}

/// f(x) = sqrt(x (1 - x)) on [0, 1]: the scale of the Gaussian fluctuation
/// of a Bernoulli(x) mean.
pub fn fluctuation_scale(x: f64) -> Result<f64> {
    require_finite("fluctuation_scale", x)?;
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfDomain {
            op: "fluctuation_scale",
            name: "x",
            value: x,
            constraint: "in [0, 1]",
        });
    }
    Ok((x * (1.0 - x)).sqrt())
}

/// ln C(n, k) via log-gamma; exact to ~1 ulp into the thousands.
pub(crate) fn log_choose(n: u32, k: u32) -> f64 {
    debug_assert!(k <= n);
    libm::lgamma(n as f64 + 1.0) - libm::lgamma(k as f64 + 1.0) - libm::lgamma((n - k) as f64 + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdf_integral_matches_antiderivative_identity() {
        // int_a^b F_Z = [x F_Z + pdf] over small safe ranges
        let left = |x: f64| x * ncdf_raw(x) + npdf_raw(x);
        for (a, b) in [(-3.0, -1.0), (-1.5, 0.5), (0.25, 2.0), (1.0, 6.0)] {
            let direct = left(b) - left(a);
            let stable = ncdf_integral_raw(a, b);
            assert!(
                (direct - stable).abs() <= 1e-14,
                "({a},{b}): {direct} vs {stable}"
            );
        }
    }

    #[test]
    fn tail_integral_positive_and_decreasing() {
        let mut prev = f64::INFINITY;
        for i in 0..200 {
            let y = -5.0 + i as f64 * 0.1;
            let v = ntail_integral_raw(y);
            assert!(v >= 0.0 && v <= prev, "y={y}");
            prev = v;
        }
    }
}
