//! Monte-Carlo cross-checks. These attack the quadrature-based distances
//! from a direction that shares no code with them: raw sampling plus an
//! empirical CDF. Slow-ish but deterministic (fixed seeds, fixed chunking).

use definetti::{
    bootstrap_dw_se, dw_mean_vs_prior, empirical_dw, mean_law, simulate_exchangeable,
    simulate_urn, tv_distance, MixingMeasure, QuadratureConfig, UrnConfig,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

// The perturbed law replaces the binomial fluctuation with its Gaussian
// limit: W = theta + f(theta) Z / sqrt(n). Its distance to the prior has a
// quadrature route (what we test) and a direct sampling route (this file):
// simulate W, bin it, integrate |F_emp - F_mu| on a fine grid.
#[test]
fn perturbed_distance_matches_direct_monte_carlo() {
    const SEED: u64 = 0x9e3779b97f4a7c15;
    const CHUNK: u64 = 4096;
    const CHUNKS: u64 = 2048; // ~8.4e6 samples
    const BINS: usize = 1 << 16;
    const LO: f64 = -0.25;
    const HI: f64 = 1.25; // W can leave [0,1]; cover 8+ sigma of overshoot
    let n = 100u32;
    let root_n = (n as f64).sqrt();
    let mu = MixingMeasure::beta(2.0, 2.0).unwrap();

    let hist = (0..CHUNKS)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(SEED);
            rng.set_stream(chunk);
            let mut counts = vec![0u64; BINS];
            for _ in 0..CHUNK {
                let theta = mu.sample_theta(&mut rng).unwrap();
                let z: f64 = StandardNormal.sample(&mut rng);
                let w = theta + (theta * (1.0 - theta)).sqrt() * z / root_n;
                let idx = (((w - LO) / (HI - LO)) * BINS as f64).floor();
                counts[(idx as i64).clamp(0, BINS as i64 - 1) as usize] += 1;
            }
            counts
        })
        .reduce(
            || vec![0u64; BINS],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(&b) {
                    *x += y;
                }
                a
            },
        );

    let total = (CHUNKS * CHUNK) as f64;
    let width = (HI - LO) / BINS as f64;
    let mut cum = 0u64;
    let mut dist = 0.0;
    for (j, c) in hist.iter().enumerate() {
        cum += c;
        let edge = LO + (j as f64 + 1.0) * width;
        let f_mu = if edge <= 0.0 {
            0.0
        } else if edge >= 1.0 {
            1.0
        } else {
            mu.cdf(edge).unwrap()
        };
        dist += (cum as f64 / total - f_mu).abs() * width;
    }

    // frozen quadrature value for Beta(2,2), n = 100; MC error here is
    // ~1.5e-4 (empirical-CDF bias) plus ~2e-5 binning, so 5e-4 is roomy
    // without being vacuous against a distance of 3.7e-3
    let want = 3.695870083518785e-3;
    assert!(
        (dist - want).abs() < 5e-4,
        "MC route {dist:.6e} vs quadrature route {want:.6e}"
    );
    assert!(dist > 2e-3, "sanity: distance cannot be near zero");
}

#[test]
fn power_law_sampler_matches_cdf() {
    const N: usize = 200_000;
    let mu = MixingMeasure::power_law(0.5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mut xs: Vec<f64> = (0..N).map(|_| mu.sample_theta(&mut rng).unwrap()).collect();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert!(xs[0] >= 0.5 && xs[N - 1] <= 0.75, "support violation");
    let mut ks = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = mu.cdf(x).unwrap();
        ks = ks.max((f - i as f64 / N as f64).abs());
        ks = ks.max(((i + 1) as f64 / N as f64 - f).abs());
    }
    // KS statistic scales like 1/sqrt(N) ~ 2.2e-3; 6e-3 is ~2.7 sigma-band
    assert!(ks < 6e-3, "KS statistic {ks:.4e}");
}

// Two generators for the same object: the reinforced urn with (a, b, m) and
// direct theta-then-binomial sampling from Beta(a/m, b/m). Both empirical
// laws must sit close to the exact law, and their dw must agree with the
// exact dw within bootstrap error.
#[test]
fn urn_and_direct_sampling_agree_on_scaled_parameters() {
    let ucfg = UrnConfig {
        a: 4,
        b: 6,
        m: 2,
        n: 15,
        replications: 200_000,
        seed: 7,
    };
    let mu = ucfg.mixing_measure().unwrap();
    assert_eq!(mu.to_json(), MixingMeasure::beta(2.0, 3.0).unwrap().to_json());
    let law = mean_law(&mu, ucfg.n, &cfg()).unwrap();

    let urn = simulate_urn(&ucfg).unwrap();
    let direct = simulate_exchangeable(&mu, ucfg.n, ucfg.replications, 8).unwrap();
    assert!(tv_distance(&urn, &law).unwrap() < 0.015);
    assert!(tv_distance(&direct, &law).unwrap() < 0.015);

    let exact = dw_mean_vs_prior(&law, &mu).unwrap();
    for emp in [&urn, &direct] {
        let dw = empirical_dw(emp, &mu).unwrap();
        let se = bootstrap_dw_se(emp, &mu, 200, 99).unwrap();
        assert!(
            (dw - exact).abs() <= 4.0 * se.max(1e-6),
            "empirical {dw:.6e} vs exact {exact:.6e}, se {se:.2e}"
        );
    }
}
