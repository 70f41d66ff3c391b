//! Reinforced-urn Monte Carlo and empirical laws of the draw mean.
//!
//! An urn starts with `a` white and `b` black balls; each draw returns the
//! ball plus `m` extra of the drawn color. The indicator sequence is
//! exchangeable, and for m ≥ 1 its mixing measure is Beta(a/m, b/m); m = 0
//! gives i.i.d. Bernoulli(a/(a+b)). Simulation is deterministic per seed and
//! independent of thread count: replications are split into fixed chunks of
//! 4096, each chunk drawing from its own counter-mode stream.

use crate::error::{Error, Result};
use crate::exact_law::ExactMeanLaw;
use crate::measure::MixingMeasure;
use crate::wasserstein::{dk_step_vs_measure, dw_step_vs_measure};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Replications per RNG stream; fixed so results never depend on the number
/// of worker threads.
const CHUNK: u64 = 4096;

/// Identifier written into CSV metadata so outputs are reproducible later.
const GENERATOR_ID: &str = "chacha8-fixed-chunk-streams";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UrnConfig {
    /// Initial white balls.
    pub a: u64,
    /// Initial black balls.
    pub b: u64,
    /// Balls of the drawn color added back per draw.
    pub m: u64,
    /// Draws per replication.
    pub n: u32,
    pub replications: u64,
    pub seed: u64,
}

impl UrnConfig {
    /// Mixing measure of the infinite exchangeable sequence this urn
    /// generates: Beta(a/m, b/m) for m ≥ 1, point mass at a/(a+b) for m = 0.
    pub fn mixing_measure(&self) -> Result<MixingMeasure> {
        self.validate()?;
        if self.m == 0 {
            MixingMeasure::dirac(self.a as f64 / (self.a + self.b) as f64)
        } else {
            MixingMeasure::beta(
                self.a as f64 / self.m as f64,
                self.b as f64 / self.m as f64,
            )
        }
    }

    fn validate(&self) -> Result<()> {
        if self.a == 0 || self.b == 0 {
            return Err(Error::InvalidMeasure(format!(
                "urn needs both colors present initially, got a={}, b={}",
                self.a, self.b
            )));
        }
        if self.n == 0 {
            return Err(Error::OutOfDomain {
                op: "simulate_urn",
                name: "n",
                value: 0.0,
                constraint: ">= 1",
            });
        }
        if self.replications == 0 {
            return Err(Error::OutOfDomain {
                op: "simulate_urn",
                name: "replications",
                value: 0.0,
                constraint: ">= 1",
            });
        }
        // ball counts must stay exactly representable in f64 so that the
        // draw probabilities w/(w+b) are computed without rounding the ints
        let total = self.a as u128 + self.b as u128 + self.m as u128 * self.n as u128;
        if total >= (1u128 << 53) {
            return Err(Error::UrnOverflow {
                a: self.a,
                b: self.b,
                m: self.m,
                n: self.n as u64,
            });
        }
        Ok(())
    }
}

/// Monte Carlo law of the number of white draws in n, over many
/// replications.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmpiricalLaw {
    pub n: u32,
    /// counts[k] = replications that drew white exactly k times.
    pub counts: Vec<u64>,
    pub replications: u64,
}

impl EmpiricalLaw {
    pub fn probs(&self) -> Vec<f64> {
        let r = self.replications as f64;
        self.counts.iter().map(|&c| c as f64 / r).collect()
    }

    pub fn mean(&self) -> f64 {
        let nf = self.n as f64;
        self.probs()
            .iter()
            .enumerate()
            .map(|(k, p)| k as f64 / nf * p)
            .sum()
    }

    /// CSV with a JSON metadata comment carrying everything needed to
    /// regenerate the file byte-for-byte.
    pub fn to_csv(&self, meta: &serde_json::Value) -> String {
        let mut out = format!("# {meta}\n");
        out.push_str("k,k_over_n,count,freq\n");
        let r = self.replications as f64;
        for (k, &c) in self.counts.iter().enumerate() {
            out.push_str(&format!(
                "{k},{},{c},{}\n",
                k as f64 / self.n as f64,
                c as f64 / r
            ));
        }
        out
    }
}

/// Metadata object embedded in simulation CSV output.
pub fn csv_metadata(cfg: &UrnConfig) -> serde_json::Value {
    serde_json::json!({
        "a": cfg.a,
        "b": cfg.b,
        "m": cfg.m,
        "n": cfg.n,
        "replications": cfg.replications,
        "seed": cfg.seed,
        "generator": GENERATOR_ID,
        "chunk": CHUNK,
    })
}

fn merge_chunks<F>(n: u32, replications: u64, seed: u64, body: F) -> Result<Vec<u64>>
where
    F: Fn(u64, &mut ChaCha8Rng, &mut [u64]) -> Result<()> + Sync,
{
    let cells = n as usize + 1;
    let chunks = replications.div_ceil(CHUNK);
    let partials: Result<Vec<Vec<u64>>> = (0..chunks)
        .into_par_iter()
        .map(|chunk_idx| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk_idx);
            let reps = CHUNK.min(replications - chunk_idx * CHUNK);
            let mut counts = vec![0u64; cells];
            body(reps, &mut rng, &mut counts)?;
            Ok(counts)
        })
        .collect();
    let mut total = vec![0u64; cells];
    for part in partials? {
        for (t, p) in total.iter_mut().zip(&part) {
            *t += p;
        }
    }
    Ok(total)
}

/// Simulate the urn; counts[k] accumulates replications with k white draws.
pub fn simulate_urn(cfg: &UrnConfig) -> Result<EmpiricalLaw> {
    cfg.validate()?;
    let counts = merge_chunks(cfg.n, cfg.replications, cfg.seed, |reps, rng, counts| {
        for _ in 0..reps {
            let mut w = cfg.a;
            let mut bl = cfg.b;
            let mut k = 0usize;
            for _ in 0..cfg.n {
                if rng.random::<f64>() * ((w + bl) as f64) < w as f64 {
                    k += 1;
                    w += cfg.m;
                } else {
                    bl += cfg.m;
                }
            }
            counts[k] += 1;
        }
        Ok(())
    })?;
    Ok(EmpiricalLaw {
        n: cfg.n,
        counts,
        replications: cfg.replications,
    })
}

/// Simulate the two-stage form directly: θ ~ μ once per replication, then
/// k ~ Binomial(n, θ). Same chunked determinism as the urn path.
pub fn simulate_exchangeable(
    mu: &MixingMeasure,
    n: u32,
    replications: u64,
    seed: u64,
) -> Result<EmpiricalLaw> {
    if n == 0 || replications == 0 {
        return Err(Error::OutOfDomain {
            op: "simulate_exchangeable",
            name: "n/replications",
            value: 0.0,
            constraint: ">= 1",
        });
    }
    let counts = merge_chunks(n, replications, seed, |reps, rng, counts| {
        for _ in 0..reps {
            let theta = mu.sample_theta(rng)?.clamp(0.0, 1.0);
            let k = Binomial::new(n as u64, theta)
                .map_err(|e| Error::InvalidMeasure(format!("binomial sampling: {e}")))?
                .sample(rng);
            counts[k as usize] += 1;
        }
        Ok(())
    })?;
    Ok(EmpiricalLaw {
        n,
        counts,
        replications,
    })
}

/// d_W between the empirical step law and μ.
pub fn empirical_dw(emp: &EmpiricalLaw, mu: &MixingMeasure) -> Result<f64> {
    dw_step_vs_measure(emp.n, &emp.probs(), mu)
}

/// d_K between the empirical step law and μ.
pub fn empirical_dk(emp: &EmpiricalLaw, mu: &MixingMeasure) -> Result<f64> {
    dk_step_vs_measure(emp.n, &emp.probs(), mu)
}

/// Total variation between the empirical law and an exact law on the same
/// grid: ½ Σ |freq_k − p_k|.
pub fn tv_distance(emp: &EmpiricalLaw, law: &ExactMeanLaw) -> Result<f64> {
    if emp.n != law.n {
        return Err(Error::InvalidMeasure(format!(
            "grid mismatch: empirical n={}, exact n={}",
            emp.n, law.n
        )));
    }
    Ok(0.5
        * emp
            .probs()
            .iter()
            .zip(&law.probs)
            .map(|(e, p)| (e - p).abs())
            .sum::<f64>())
}

/// Bootstrap standard error of empirical_dw: multinomial resamples of the
/// counts (sequential conditional binomials), one RNG stream per resample.
pub fn bootstrap_dw_se(
    emp: &EmpiricalLaw,
    mu: &MixingMeasure,
    resamples: u32,
    seed: u64,
) -> Result<f64> {
    if resamples < 2 {
        return Err(Error::OutOfDomain {
            op: "bootstrap_dw_se",
            name: "resamples",
            value: resamples as f64,
            constraint: ">= 2",
        });
    }
    let probs = emp.probs();
    let dws: Result<Vec<f64>> = (0..resamples)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let mut remaining = emp.replications;
            let mut rest = 1.0;
            let mut re_probs = vec![0.0; probs.len()];
            for (k, &p) in probs.iter().enumerate() {
                if remaining == 0 || rest <= 0.0 {
                    break;
                }
                let q = (p / rest).clamp(0.0, 1.0);
                let c = if k + 1 == probs.len() {
                    remaining
                } else {
                    Binomial::new(remaining, q)
                        .map_err(|e| Error::InvalidMeasure(format!("bootstrap: {e}")))?
                        .sample(&mut rng)
                };
                re_probs[k] = c as f64 / emp.replications as f64;
                remaining -= c;
                rest -= p;
            }
            dw_step_vs_measure(emp.n, &re_probs, mu)
        })
        .collect();
    let dws = dws?;
    let mean = dws.iter().sum::<f64>() / dws.len() as f64;
    let var = dws.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>()
        / (dws.len() - 1) as f64;
    Ok(var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_law::mean_law;
    use crate::quadrature::QuadratureConfig;

    #[test]
    fn overflow_guard() {
        let cfg = UrnConfig {
            a: 1 << 52,
            b: 1 << 52,
            m: 1,
            n: 1,
            replications: 1,
            seed: 0,
        };
        assert!(matches!(
            simulate_urn(&cfg),
            Err(Error::UrnOverflow { .. })
        ));
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let cfg = UrnConfig {
            a: 2,
            b: 3,
            m: 1,
            n: 8,
            replications: 10_000,
            seed: 42,
        };
        let default_pool = simulate_urn(&cfg).unwrap();
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| simulate_urn(&cfg))
            .unwrap();
        assert_eq!(default_pool.counts, single.counts);
        let again = simulate_urn(&cfg).unwrap();
        assert_eq!(default_pool.counts, again.counts);
    }

    #[test]
    fn urn_matches_exact_law() {
        // (a,b,m) = (2,3,1) mixes over Beta(2,3)
        let cfg = UrnConfig {
            a: 2,
            b: 3,
            m: 1,
            n: 10,
            replications: 200_000,
            seed: 7,
        };
        let emp = simulate_urn(&cfg).unwrap();
        let mu = cfg.mixing_measure().unwrap();
        let law = mean_law(&mu, 10, &QuadratureConfig::default()).unwrap();
        let tv = tv_distance(&emp, &law).unwrap();
        assert!(tv < 0.01, "tv = {tv}");
        // two-stage simulation agrees too
        let emp2 = simulate_exchangeable(&mu, 10, 200_000, 8).unwrap();
        let tv2 = tv_distance(&emp2, &law).unwrap();
        assert!(tv2 < 0.01, "tv2 = {tv2}");
    }

    #[test]
    fn zero_reinforcement_is_iid() {
        let cfg = UrnConfig {
            a: 1,
            b: 3,
            m: 0,
            n: 5,
            replications: 200_000,
            seed: 11,
        };
        let emp = simulate_urn(&cfg).unwrap();
        let mu = cfg.mixing_measure().unwrap(); // point mass at 1/4
        let law = mean_law(&mu, 5, &QuadratureConfig::default()).unwrap();
        assert!(tv_distance(&emp, &law).unwrap() < 0.01);
    }

    #[test]
    fn draw_sequence_is_exchangeable() {
        // three draws from (1,1,1): the 3 permutations of one white must be
        // equally likely (each 1/12); check within 4 standard errors
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let reps = 120_000u32;
        let mut pattern = [0u32; 8];
        for _ in 0..reps {
            let (mut w, mut b) = (1u64, 1u64);
            let mut bits = 0usize;
            for i in 0..3 {
                if rng.random::<f64>() * ((w + b) as f64) < w as f64 {
                    bits |= 1 << i;
                    w += 1;
                } else {
                    b += 1;
                }
            }
            pattern[bits] += 1;
        }
        let p = 1.0 / 12.0;
        let se = (p * (1.0 - p) / reps as f64).sqrt();
        for bits in [0b001, 0b010, 0b100] {
            let freq = pattern[bits] as f64 / reps as f64;
            assert!(
                (freq - p).abs() < 4.0 * se,
                "pattern {bits:03b}: freq {freq}, want {p}"
            );
        }
    }

    #[test]
    fn bootstrap_se_scale() {
        let cfg = UrnConfig {
            a: 2,
            b: 3,
            m: 1,
            n: 10,
            replications: 100_000,
            seed: 5,
        };
        let emp = simulate_urn(&cfg).unwrap();
        let mu = cfg.mixing_measure().unwrap();
        let se = bootstrap_dw_se(&emp, &mu, 60, 99).unwrap();
        // dw noise scales like ~n^(-1/2)_reps; just pin the magnitude window
        assert!(se > 1e-5 && se < 1e-2, "se = {se}");
        let se2 = bootstrap_dw_se(&emp, &mu, 60, 99).unwrap();
        assert_eq!(se, se2);
    }
}
