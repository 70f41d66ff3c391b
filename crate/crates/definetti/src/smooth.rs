//! Tabulated density on [0, 1]: piecewise-linear interpolation of caller-
//! supplied (x, p, p') nodes, with exact per-segment mass and first-moment
//! accumulators. The derivative values are taken as given, never estimated
//! by differencing the p column.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawSmooth {
    table: Vec<(f64, f64, f64)>,
    singular_exponents: (f64, f64),
    envelope: Option<f64>,
}

/// A density given by (x, p(x), p'(x)) rows over a strictly increasing grid.
/// Total mass must be 1 within 1e-8; it is then renormalized exactly so the
/// CDF reaches 1 at the last node.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RawSmooth", into = "RawSmooth")]
pub struct SmoothTable {
    xs: Vec<f64>,
    ps: Vec<f64>,
    dps: Vec<f64>,
    pub singular_exponents: (f64, f64),
    pub envelope: Option<f64>,
    // cumulative mass and cumulative int x p(x) dx at each node
    cum_mass: Vec<f64>,
    cum_xmass: Vec<f64>,
}

impl From<SmoothTable> for RawSmooth {
    fn from(t: SmoothTable) -> Self {
        RawSmooth {
            table: t
                .xs
                .iter()
                .zip(&t.ps)
                .zip(&t.dps)
                .map(|((&x, &p), &dp)| (x, p, dp))
                .collect(),
            singular_exponents: t.singular_exponents,
            envelope: t.envelope,
        }
    }
}

impl TryFrom<RawSmooth> for SmoothTable {
    type Error = Error;
    fn try_from(raw: RawSmooth) -> Result<Self> {
        SmoothTable::new(raw.table, raw.singular_exponents, raw.envelope)
    }
}

// int_a^x u * (p_a + s (u - a)) du
fn xmass_piece(a: f64, pa: f64, s: f64, x: f64) -> f64 {
    pa * (x * x - a * a) / 2.0 + s * ((x * x * x - a * a * a) / 3.0 - a * (x * x - a * a) / 2.0)
}

impl SmoothTable {
    pub fn new(
        table: Vec<(f64, f64, f64)>,
        singular_exponents: (f64, f64),
        envelope: Option<f64>,
    ) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidMeasure(msg));
        if table.len() < 2 {
            return bad("smooth density needs at least 2 table rows".into());
        }
        let mut xs = Vec::with_capacity(table.len());
        let mut ps = Vec::with_capacity(table.len());
        let mut dps = Vec::with_capacity(table.len());
        for &(x, p, dp) in &table {
            if !x.is_finite() || !p.is_finite() || !dp.is_finite() {
                return bad(format!("non-finite table row ({x}, {p}, {dp})"));
            }
            if !(0.0..=1.0).contains(&x) {
                return bad(format!("table abscissa {x} outside [0, 1]"));
            }
            if p < 0.0 {
                return bad(format!("negative density {p} at x = {x}"));
            }
            if let Some(&last) = xs.last() {
                if x <= last {
                    return bad(format!("table grid not strictly increasing at x = {x}"));
                }
            }
            xs.push(x);
            ps.push(p);
            dps.push(dp);
        }
        let (a0, a1) = singular_exponents;
        if !(a0 > -1.0 && a1 > -1.0) {
            return bad(format!(
                "singular exponents ({a0}, {a1}) must both exceed -1"
            ));
        }

        let mut cum_mass = vec![0.0; xs.len()];
        let mut cum_xmass = vec![0.0; xs.len()];
        for i in 1..xs.len() {
            let dx = xs[i] - xs[i - 1];
            let s = (ps[i] - ps[i - 1]) / dx;
            cum_mass[i] = cum_mass[i - 1] + dx * (ps[i - 1] + ps[i]) / 2.0;
            cum_xmass[i] = cum_xmass[i - 1] + xmass_piece(xs[i - 1], ps[i - 1], s, xs[i]);
        }
        let total = *cum_mass.last().unwrap();
        if (total - 1.0).abs() > 1e-8 {
            return bad(format!("tabulated density integrates to {total}, not 1"));
        }
        for v in ps
            .iter_mut()
            .chain(dps.iter_mut())
            .chain(cum_mass.iter_mut())
            .chain(cum_xmass.iter_mut())
        {
            *v /= total;
        }
        let max_p = ps.iter().cloned().fold(0.0, f64::max);
        if let Some(env) = envelope {
            if !(env.is_finite() && env >= max_p - 1e-12) {
                return bad(format!(
                    "sampling envelope {env} is below the table maximum {max_p}"
                ));
            }
        }
        Ok(Self {
            xs,
            ps,
            dps,
            singular_exponents,
            envelope,
            cum_mass,
            cum_xmass,
        })
    }

    pub fn support(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    pub(crate) fn nodes(&self) -> &[f64] {
        &self.xs
    }

    /// Index of the segment containing x; None outside the table.
    fn segment(&self, x: f64) -> Option<usize> {
        if x < self.xs[0] || x > *self.xs.last().unwrap() {
            return None;
        }
        let i = self.xs.partition_point(|&g| g <= x);
        Some(i.saturating_sub(1).min(self.xs.len() - 2))
    }

    pub fn density(&self, x: f64) -> f64 {
        match self.segment(x) {
            None => 0.0,
            Some(i) => {
                let s = (self.ps[i + 1] - self.ps[i]) / (self.xs[i + 1] - self.xs[i]);
                self.ps[i] + s * (x - self.xs[i])
            }
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match self.segment(x) {
            None => 0.0,
            Some(i) => {
                let w = (x - self.xs[i]) / (self.xs[i + 1] - self.xs[i]);
                self.dps[i] + (self.dps[i + 1] - self.dps[i]) * w
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x < self.xs[0] {
            return 0.0;
        }
        match self.segment(x) {
            None => 1.0,
            Some(i) => {
                let d = x - self.xs[i];
                let s = (self.ps[i + 1] - self.ps[i]) / (self.xs[i + 1] - self.xs[i]);
                (self.cum_mass[i] + d * self.ps[i] + s * d * d / 2.0).min(1.0)
            }
        }
    }

    /// int_0^x u p(u) du
    fn xmass_to(&self, x: f64) -> f64 {
        if x < self.xs[0] {
            return 0.0;
        }
        match self.segment(x) {
            None => *self.cum_xmass.last().unwrap(),
            Some(i) => {
                let s = (self.ps[i + 1] - self.ps[i]) / (self.xs[i + 1] - self.xs[i]);
                self.cum_xmass[i] + xmass_piece(self.xs[i], self.ps[i], s, x)
            }
        }
    }

    /// int_(a,b] x p(x) dx (endpoint convention immaterial: no atoms)
    pub fn partial_mean(&self, a: f64, b: f64) -> f64 {
        self.xmass_to(b) - self.xmass_to(a)
    }

}

#[cfg(test)]
mod tests {
    use super::*;

    fn tent() -> SmoothTable {
        // p = 4x on [0, 1/2], 4(1-x) on [1/2, 1]; exactly representable
        SmoothTable::new(
            vec![
                (0.0, 0.0, 4.0),
                (0.25, 1.0, 4.0),
                (0.5, 2.0, 0.0),
                (0.75, 1.0, -4.0),
                (1.0, 0.0, -4.0),
            ],
            (1.0, 1.0),
            Some(2.0),
        )
        .unwrap()
    }

    #[test]
    fn tent_cdf_and_partial_mean() {
        let t = tent();
        assert_eq!(t.cdf(0.0), 0.0);
        assert!((t.cdf(0.5) - 0.5).abs() < 1e-15);
        assert!((t.cdf(1.0) - 1.0).abs() < 1e-15);
        // int_0^{1/2} x 4x dx = 1/6
        assert!((t.xmass_to(0.5) - 1.0 / 6.0).abs() < 1e-15);
        // full mean = 1/2 by symmetry
        assert!((t.partial_mean(0.0, 1.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_wrong_mass() {
        let r = SmoothTable::new(
            vec![(0.0, 1.0, 0.0), (1.0, 3.0, 0.0)],
            (0.0, 0.0),
            None,
        );
        assert!(r.is_err());
    }
}
