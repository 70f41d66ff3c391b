//! Mixing measures on [0, 1] for exchangeable Bernoulli sequences: the prior
//! μ in the integral representation P[X₁=e₁,…,Xₙ=eₙ] = ∫ t^k (1−t)^{n−k} μ(dt).
//!
//! Supported kinds: Beta(α,β); finite atomic measures (atoms at 0 and 1
//! allowed); tabulated smooth densities; the power-law family with density
//! C_p (x−1/2)^{γ−1} on (1/2, 3/4); and finite mixtures of the above.
//!
//! All instances are canonical after construction (atoms sorted and merged,
//! weights renormalized); construct via the provided constructors or
//! `from_json`, not by deserializing with serde directly.

use crate::error::{Error, Result};
use crate::quadrature::{gk_adaptive, tanh_sinh, ts_over, QuadratureConfig, Scheme};
use crate::smooth::SmoothTable;
use crate::special::{beta_inc_regularized, log_beta_fn, Accuracy};
use rand::{Rng, RngExt};
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub weight: f64,
    pub measure: MixingMeasure,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MixingMeasure {
    Beta {
        alpha: f64,
        beta: f64,
    },
    /// Finite support; `atoms` is (location, mass), sorted by location.
    Atomic {
        atoms: Vec<(f64, f64)>,
    },
    SmoothDensity(SmoothTable),
    /// Density γ4^γ (x−1/2)^{γ−1} on (1/2, 3/4), γ ∈ (0, 1).
    PowerLaw {
        gamma: f64,
    },
    Mixture {
        components: Vec<MixtureComponent>,
    },
}

fn invalid(msg: String) -> Error {
    Error::InvalidMeasure(msg)
}

impl MixingMeasure {
    pub fn beta(alpha: f64, beta: f64) -> Result<Self> {
        let mut m = MixingMeasure::Beta { alpha, beta };
        m.canonicalize()?;
        Ok(m)
    }

    pub fn atomic(atoms: Vec<(f64, f64)>) -> Result<Self> {
        let mut m = MixingMeasure::Atomic { atoms };
        m.canonicalize()?;
        Ok(m)
    }

    /// Point mass at `loc`.
    pub fn dirac(loc: f64) -> Result<Self> {
        Self::atomic(vec![(loc, 1.0)])
    }

    pub fn power_law(gamma: f64) -> Result<Self> {
        let mut m = MixingMeasure::PowerLaw { gamma };
        m.canonicalize()?;
        Ok(m)
    }

    pub fn smooth_density(
        table: Vec<(f64, f64, f64)>,
        singular_exponents: (f64, f64),
        envelope: Option<f64>,
    ) -> Result<Self> {
        Ok(MixingMeasure::SmoothDensity(SmoothTable::new(
            table,
            singular_exponents,
            envelope,
        )?))
    }

    pub fn mixture(components: Vec<(f64, MixingMeasure)>) -> Result<Self> {
        let mut m = MixingMeasure::Mixture {
            components: components
                .into_iter()
                .map(|(weight, measure)| MixtureComponent { weight, measure })
                .collect(),
        };
        m.canonicalize()?;
        Ok(m)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let mut m: MixingMeasure =
            serde_json::from_str(s).map_err(|e| Error::MeasureJson(e.to_string()))?;
        m.canonicalize()?;
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("measure serialization cannot fail")
    }

    pub fn validate(&self) -> Result<()> {
        self.clone().canonicalize()
    }

    fn canonicalize(&mut self) -> Result<()> {
        match self {
            MixingMeasure::Beta { alpha, beta } => {
                for (name, v) in [("alpha", *alpha), ("beta", *beta)] {
                    if !(v.is_finite() && v > 0.0) {
                        return Err(Error::OutOfDomain {
                            op: "MixingMeasure::beta",
                            name,
                            value: v,
                            constraint: "finite and > 0",
                        });
                    }
                }
                Ok(())
            }
            MixingMeasure::Atomic { atoms } => {
                if atoms.is_empty() {
                    return Err(invalid("atomic measure needs at least one atom".into()));
                }
                for &(loc, mass) in atoms.iter() {
                    if !loc.is_finite() || !(0.0..=1.0).contains(&loc) {
                        return Err(invalid(format!("atom location {loc} outside [0, 1]")));
                    }
                    if !mass.is_finite() || mass <= 0.0 {
                        return Err(invalid(format!("atom mass {mass} must be positive")));
                    }
                }
                atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
                let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
                for &(loc, mass) in atoms.iter() {
                    match merged.last_mut() {
                        Some(last) if last.0 == loc => last.1 += mass,
                        _ => merged.push((loc, mass)),
                    }
                }
                let total: f64 = merged.iter().map(|a| a.1).sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(invalid(format!("atomic masses sum to {total}, not 1")));
                }
                for a in merged.iter_mut() {
                    a.1 /= total;
                }
                *atoms = merged;
                Ok(())
            }
            MixingMeasure::SmoothDensity(_) => Ok(()), // validated at table construction
            MixingMeasure::PowerLaw { gamma } => {
                if !(gamma.is_finite() && *gamma > 0.0 && *gamma < 1.0) {
                    return Err(Error::OutOfDomain {
                        op: "MixingMeasure::power_law",
                        name: "gamma",
                        value: *gamma,
                        constraint: "in (0, 1)",
                    });
                }
                Ok(())
            }
            MixingMeasure::Mixture { components } => {
                if components.is_empty() {
                    return Err(invalid("mixture needs at least one component".into()));
                }
                let mut total = 0.0;
                for c in components.iter_mut() {
                    if !c.weight.is_finite() || c.weight <= 0.0 {
                        return Err(invalid(format!(
                            "mixture weight {} must be positive",
                            c.weight
                        )));
                    }
                    total += c.weight;
                    c.measure.canonicalize()?;
                }
                if (total - 1.0).abs() > 1e-12 {
                    return Err(invalid(format!("mixture weights sum to {total}, not 1")));
                }
                for c in components.iter_mut() {
                    c.weight /= total;
                }
                Ok(())
            }
        }
    }

    /// Closed support interval (infimum, supremum).
    pub fn support(&self) -> (f64, f64) {
        match self {
            MixingMeasure::Beta { .. } => (0.0, 1.0),
            MixingMeasure::Atomic { atoms } => (atoms[0].0, atoms[atoms.len() - 1].0),
            MixingMeasure::SmoothDensity(t) => t.support(),
            MixingMeasure::PowerLaw { .. } => (0.5, 0.75),
            MixingMeasure::Mixture { components } => components.iter().fold(
                (f64::INFINITY, f64::NEG_INFINITY),
                |(lo, hi), c| {
                    let (a, b) = c.measure.support();
                    (lo.min(a), hi.max(b))
                },
            ),
        }
    }

    /// All atoms as (location, mass), sorted, with mixture weights applied.
    pub fn atoms(&self) -> Vec<(f64, f64)> {
        match self {
            MixingMeasure::Atomic { atoms } => atoms.clone(),
            MixingMeasure::Mixture { components } => {
                let mut out: Vec<(f64, f64)> = Vec::new();
                for c in components {
                    for (loc, mass) in c.measure.atoms() {
                        out.push((loc, c.weight * mass));
                    }
                }
                out.sort_by(|a, b| a.0.total_cmp(&b.0));
                let mut merged: Vec<(f64, f64)> = Vec::new();
                for (loc, mass) in out {
                    match merged.last_mut() {
                        Some(last) if last.0 == loc => last.1 += mass,
                        _ => merged.push((loc, mass)),
                    }
                }
                merged
            }
            _ => Vec::new(),
        }
    }

    pub fn mass_at(&self, x: f64) -> f64 {
        match self {
            MixingMeasure::Atomic { atoms } => atoms
                .iter()
                .filter(|&&(loc, _)| loc == x)
                .map(|&(_, m)| m)
                .sum(),
            MixingMeasure::Mixture { components } => components
                .iter()
                .map(|c| c.weight * c.measure.mass_at(x))
                .sum(),
            _ => 0.0,
        }
    }

    /// μ({0}) + μ({1}).
    pub fn boundary_mass(&self) -> f64 {
        self.mass_at(0.0) + self.mass_at(1.0)
    }

    /// True when μ has a density on (0, 1) (no atoms anywhere).
    pub fn has_density(&self) -> bool {
        match self {
            MixingMeasure::Beta { .. }
            | MixingMeasure::SmoothDensity(_)
            | MixingMeasure::PowerLaw { .. } => true,
            MixingMeasure::Atomic { .. } => false,
            MixingMeasure::Mixture { components } => {
                components.iter().all(|c| c.measure.has_density())
            }
        }
    }

    /// Density value at interior x; None when the measure has atoms.
    pub(crate) fn density_at(&self, x: f64) -> Option<f64> {
        match self {
            MixingMeasure::Beta { alpha, beta } => {
                if x <= 0.0 || x >= 1.0 {
                    return Some(0.0);
                }
                let lgb = log_beta_fn(*alpha, *beta).expect("validated parameters");
                Some(((alpha - 1.0) * x.ln() + (beta - 1.0) * (-x).ln_1p() - lgb).exp())
            }
            MixingMeasure::Atomic { .. } => None,
            MixingMeasure::SmoothDensity(t) => Some(t.density(x)),
            MixingMeasure::PowerLaw { gamma } => {
                if x <= 0.5 || x >= 0.75 {
                    return Some(0.0);
                }
                let c_p = gamma * libm::exp2(2.0 * gamma); // γ 4^γ
                Some(c_p * (x - 0.5).powf(gamma - 1.0))
            }
            MixingMeasure::Mixture { components } => {
                let mut total = 0.0;
                for c in components {
                    total += c.weight * c.measure.density_at(x)?;
                }
                Some(total)
            }
        }
    }

    /// Density derivative at interior x; None when the measure has atoms.
    pub(crate) fn density_derivative_at(&self, x: f64) -> Option<f64> {
        match self {
            MixingMeasure::Beta { alpha, beta } => {
                if x <= 0.0 || x >= 1.0 {
                    return Some(0.0);
                }
                let p = self.density_at(x)?;
                Some(p * ((alpha - 1.0) / x - (beta - 1.0) / (1.0 - x)))
            }
            MixingMeasure::Atomic { .. } => None,
            MixingMeasure::SmoothDensity(t) => Some(t.derivative(x)),
            MixingMeasure::PowerLaw { gamma } => {
                if x <= 0.5 || x >= 0.75 {
                    return Some(0.0);
                }
                let c_p = gamma * libm::exp2(2.0 * gamma);
                Some(c_p * (gamma - 1.0) * (x - 0.5).powf(gamma - 2.0))
            }
            MixingMeasure::Mixture { components } => {
                let mut total = 0.0;
                for c in components {
                    total += c.weight * c.measure.density_derivative_at(x)?;
                }
                Some(total)
            }
        }
    }

    /// F_μ(x) = μ([0, x]), right-continuous.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::NonFinite {
                op: "cdf",
                value: x,
            });
        }
        match self {
            MixingMeasure::Beta { alpha, beta } => {
                if x <= 0.0 {
                    Ok(0.0)
                } else if x >= 1.0 {
                    Ok(1.0)
                } else {
                    beta_inc_regularized(x, *alpha, *beta)
                }
            }
            MixingMeasure::Atomic { atoms } => Ok(atoms
                .iter()
                .take_while(|&&(loc, _)| loc <= x)
                .map(|&(_, m)| m)
                .sum()),
            MixingMeasure::SmoothDensity(t) => Ok(t.cdf(x)),
            MixingMeasure::PowerLaw { gamma } => {
                let s = (x.clamp(0.5, 0.75) - 0.5) * 4.0;
                Ok(s.powf(*gamma))
            }
            MixingMeasure::Mixture { components } => {
                let mut total = 0.0;
                for c in components {
                    total += c.weight * c.measure.cdf(x)?;
                }
                Ok(total)
            }
        }
    }

    /// Left limit F_μ(x⁻) = μ([0, x)).
    pub fn cdf_left(&self, x: f64) -> Result<f64> {
        match self {
            MixingMeasure::Atomic { atoms } => Ok(atoms
                .iter()
                .take_while(|&&(loc, _)| loc < x)
                .map(|&(_, m)| m)
                .sum()),
            MixingMeasure::Mixture { components } => {
                let mut total = 0.0;
                for c in components {
                    total += c.weight * c.measure.cdf_left(x)?;
                }
                Ok(total)
            }
            _ => self.cdf(x),
        }
    }

    /// ∫_(a,b] x μ(dx). The half-open convention makes
    /// ∫ₐᵇ F_μ(x) dx = b F(b) − a F(a) − partial_mean(a, b) exact even when
    /// atoms sit at cell endpoints.
    pub fn partial_mean(&self, a: f64, b: f64) -> Result<f64> {
        if !(0.0 <= a && a <= b && b <= 1.0) {
            return Err(Error::OutOfDomain {
                op: "partial_mean",
                name: "(a, b)",
                value: if a.is_finite() { b } else { a },
                constraint: "0 <= a <= b <= 1",
            });
        }
        match self {
            MixingMeasure::Beta { alpha, beta } => {
                let mean = alpha / (alpha + beta);
                let ia = if a <= 0.0 {
                    0.0
                } else {
                    beta_inc_regularized(a, alpha + 1.0, *beta)?
                };
                let ib = if b >= 1.0 {
                    1.0
                } else {
                    beta_inc_regularized(b, alpha + 1.0, *beta)?
                };
                Ok(mean * (ib - ia))
            }
            MixingMeasure::Atomic { atoms } => Ok(atoms
                .iter()
                .filter(|&&(loc, _)| a < loc && loc <= b)
                .map(|&(loc, m)| loc * m)
                .sum()),
            MixingMeasure::SmoothDensity(t) => Ok(t.partial_mean(a, b)),
            MixingMeasure::PowerLaw { gamma } => {
                // antiderivative of (1/2 + s) C_p s^{γ−1} in s = x − 1/2:
                // C_p (s^γ / (2γ) + s^{γ+1} / (γ+1))
                let g = *gamma;
                let c_p = g * libm::exp2(2.0 * g);
                let anti = |x: f64| {
                    let s = (x.clamp(0.5, 0.75) - 0.5).max(0.0);
                    c_p * (s.powf(g) / (2.0 * g) + s.powf(g + 1.0) / (g + 1.0))
                };
                Ok(anti(b) - anti(a))
            }
            MixingMeasure::Mixture { components } => {
                let mut total = 0.0;
                for c in components {
                    total += c.weight * c.measure.partial_mean(a, b)?;
                }
                Ok(total)
            }
        }
    }

    /// E[θ].
    pub fn mean(&self) -> Result<f64> {
        self.partial_mean(0.0, 1.0)
    }

    /// E[g(θ)] over the full measure. `hints` lists interior points where g
    /// has kinks; quadrature pieces are split there. Beta and power-law
    /// expectations always use tanh-sinh (endpoint singularities); tabulated
    /// densities honor `cfg.scheme` over their node partition.
    pub(crate) fn expect<F: Fn(f64) -> f64>(
        &self,
        g: &F,
        hints: &[f64],
        cfg: &QuadratureConfig,
    ) -> Result<f64> {
        let acc = cfg.accuracy;
        match self {
            MixingMeasure::Beta { alpha, beta } => {
                beta_expect(*alpha, *beta, g, hints, acc, cfg.ts_levels())
            }
            MixingMeasure::Atomic { atoms } => {
                Ok(atoms.iter().map(|&(loc, m)| m * g(loc)).sum())
            }
            MixingMeasure::SmoothDensity(t) => {
                let (lo, hi) = t.support();
                let mut pts: Vec<f64> = t.nodes().to_vec();
                pts.extend(hints.iter().copied().filter(|&h| h > lo && h < hi));
                pts.sort_by(f64::total_cmp);
                pts.dedup();
                let f = |x: f64| g(x) * t.density(x);
                match cfg.scheme {
                    Scheme::GaussKronrodAdaptive => {
                        gk_adaptive(f, &pts, acc, cfg.max_subdivisions)
                    }
                    Scheme::TanhSinh => {
                        ts_over(&|x, _, _| f(x), &pts, acc, cfg.ts_levels())
                    }
                }
            }
            MixingMeasure::PowerLaw { gamma } => {
                // substitute v = F(θ): E[g(θ)] = ∫₀¹ g(1/2 + (1/4) v^{1/γ}) dv,
                // which removes the density singularity at θ = 1/2
                let inv_g = 1.0 / gamma;
                let mut pts = vec![0.0];
                for &h in hints {
                    if h > 0.5 && h < 0.75 {
                        pts.push(((h - 0.5) * 4.0).powf(*gamma));
                    }
                }
                pts.push(1.0);
                pts.sort_by(f64::total_cmp);
                pts.dedup();
                ts_over(
                    &|v: f64, _, _| g(0.5 + 0.25 * v.powf(inv_g)),
                    &pts,
                    acc,
                    cfg.ts_levels(),
                )
            }
            MixingMeasure::Mixture { components } => {
                let mut total = 0.0;
                for c in components {
                    total += c.weight * c.measure.expect(g, hints, cfg)?;
                }
                Ok(total)
            }
        }
    }

    /// E[θ(1−θ)]. Closed form for Beta and Atomic, quadrature otherwise.
    pub fn moment_theta_one_minus_theta(&self) -> Result<f64> {
        match self {
            MixingMeasure::Beta { alpha, beta } => {
                let s = alpha + beta;
                Ok(alpha * beta / (s * (s + 1.0)))
            }
            MixingMeasure::Atomic { atoms } => Ok(atoms
                .iter()
                .map(|&(loc, m)| m * loc * (1.0 - loc))
                .sum()),
            MixingMeasure::Mixture { components } => {
                let mut total = 0.0;
                for c in components {
                    total += c.weight * c.measure.moment_theta_one_minus_theta()?;
                }
                Ok(total)
            }
            _ => self.expect(&|t| t * (1.0 - t), &[], &QuadratureConfig::default()),
        }
    }

    /// E[θ² + (1−θ)²] ∈ [1/2, 1].
    pub fn moment_sq_plus_comp_sq(&self) -> Result<f64> {
        match self {
            MixingMeasure::Beta { alpha, beta } => {
                let s = alpha + beta;
                Ok((alpha * (alpha + 1.0) + beta * (beta + 1.0)) / (s * (s + 1.0)))
            }
            MixingMeasure::Atomic { atoms } => Ok(atoms
                .iter()
                .map(|&(loc, m)| m * (loc * loc + (1.0 - loc) * (1.0 - loc)))
                .sum()),
            MixingMeasure::Mixture { components } => {
                let mut total = 0.0;
                for c in components {
                    total += c.weight * c.measure.moment_sq_plus_comp_sq()?;
                }
                Ok(total)
            }
            _ => self.expect(
                &|t| t * t + (1.0 - t) * (1.0 - t),
                &[],
                &QuadratureConfig::default(),
            ),
        }
    }

    /// Strip the mass at {0, 1} and renormalize: returns (μ̃, q) with
    /// q = μ({0,1}) and μ̃(A) = μ(A ∖ {0,1}) / (1−q). Identity when q = 0.
    pub fn kill_boundary(&self) -> Result<(MixingMeasure, f64)> {
        let q = self.boundary_mass();
        if q == 0.0 {
            return Ok((self.clone(), 0.0));
        }
        if q >= 1.0 - 1e-15 {
            return Err(Error::DegenerateBoundary);
        }
        match self {
            MixingMeasure::Atomic { atoms } => {
                let interior: Vec<(f64, f64)> = atoms
                    .iter()
                    .filter(|&&(loc, _)| loc != 0.0 && loc != 1.0)
                    .map(|&(loc, m)| (loc, m / (1.0 - q)))
                    .collect();
                Ok((MixingMeasure::atomic(interior)?, q))
            }
            MixingMeasure::Mixture { components } => {
                let mut kept: Vec<(f64, MixingMeasure)> = Vec::new();
                for c in components {
                    let qi = c.measure.boundary_mass();
                    if qi >= 1.0 - 1e-15 {
                        continue; // component dies entirely
                    }
                    let (inner, _) = c.measure.kill_boundary()?;
                    kept.push((c.weight * (1.0 - qi) / (1.0 - q), inner));
                }
                match kept.len() {
                    0 => Err(Error::DegenerateBoundary),
                    1 => Ok((kept.pop().unwrap().1, q)),
                    _ => Ok((MixingMeasure::mixture(kept)?, q)),
                }
            }
            // density kinds carry no boundary mass, q == 0 handled above
            _ => unreachable!("density measures have zero boundary mass"),
        }
    }

    /// One draw of θ ~ μ.
    pub fn sample_theta<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        match self {
            MixingMeasure::Beta { alpha, beta } => {
                let dist = rand_distr::Beta::new(*alpha, *beta)
                    .map_err(|e| invalid(format!("beta sampler: {e}")))?;
                Ok(dist.sample(rng))
            }
            MixingMeasure::Atomic { atoms } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for &(loc, m) in atoms {
                    acc += m;
                    if u < acc {
                        return Ok(loc);
                    }
                }
                Ok(atoms[atoms.len() - 1].0)
            }
            MixingMeasure::SmoothDensity(t) => {
                let env = t.envelope.ok_or(Error::MissingEnvelope)?;
                let (lo, hi) = t.support();
                loop {
                    let x = lo + (hi - lo) * rng.random::<f64>();
                    let y = env * rng.random::<f64>();
                    if y <= t.density(x) {
                        return Ok(x);
                    }
                }
            }
            MixingMeasure::PowerLaw { gamma } => {
                // inverse CDF: θ = 1/2 + (1/4) U^{1/γ}
                let u: f64 = rng.random();
                Ok(0.5 + 0.25 * u.powf(1.0 / gamma))
            }
            MixingMeasure::Mixture { components } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for c in components {
                    acc += c.weight;
                    if u < acc {
                        return c.measure.sample_theta(rng);
                    }
                }
                components[components.len() - 1].measure.sample_theta(rng)
            }
        }
    }
}

impl fmt::Display for MixingMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MixingMeasure::Beta { alpha, beta } => write!(f, "Beta({alpha}, {beta})"),
            MixingMeasure::Atomic { atoms } => {
                write!(f, "Atomic{{")?;
                for (i, (loc, m)) in atoms.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "({loc}, {m})")?;
                }
                write!(f, "}}")
            }
            MixingMeasure::SmoothDensity(t) => {
                let (lo, hi) = t.support();
                write!(f, "SmoothDensity[{} nodes on ({lo}, {hi})]", t.nodes().len())
            }
            MixingMeasure::PowerLaw { gamma } => write!(f, "PowerLaw({gamma})"),
            MixingMeasure::Mixture { components } => {
                write!(f, "Mixture[")?;
                for (i, c) in components.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "{}*{}", c.weight, c.measure)?;
                }
                write!(f, "]")
            }
        }
    }
}

/// E[g(θ)] for θ ~ Beta(α, β) by tanh-sinh over (0, hints…, 1). The density
/// is evaluated in log space with the distance-to-endpoint arguments supplied
/// by the quadrature, so u^{α−1} and (1−u)^{β−1} stay accurate at both ends.
pub(crate) fn beta_expect<F: Fn(f64) -> f64>(
    alpha: f64,
    beta: f64,
    g: &F,
    hints: &[f64],
    acc: Accuracy,
    max_level: u32,
) -> Result<f64> {
    let lgb = log_beta_fn(alpha, beta)?;
    let mut pts = vec![0.0, 1.0];
    pts.extend(hints.iter().copied().filter(|&h| h > 0.0 && h < 1.0));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let pieces = (pts.len() - 1).max(1);
    let piece_acc = Accuracy {
        abs_tol: acc.abs_tol / pieces as f64,
        rel_tol: acc.rel_tol,
    };
    let mut total = 0.0;
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let at_zero = a == 0.0;
        let at_one = b == 1.0;
        let f = |x: f64, da: f64, db: f64| {
            let lt = if at_zero { da.ln() } else { x.ln() };
            let l1t = if at_one { db.ln() } else { (-x).ln_1p() };
            g(x) * ((alpha - 1.0) * lt + (beta - 1.0) * l1t - lgb).exp()
        };
        total += tanh_sinh(&f, a, b, piece_acc, max_level)?;
    }
    Ok(total)
}
