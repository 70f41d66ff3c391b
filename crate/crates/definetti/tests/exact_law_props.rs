//! The exact law of the mean: frozen pmf banks plus structural identities
//! (normalization, law of total expectation, conditional-variance split).

use definetti::{mean_law, MixingMeasure, QuadratureConfig};

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

// Beta(2, 3) mixing, n = 20: pmf is a beta-binomial with a closed form as a
// ratio of beta functions. All 21 values were computed independently in
// rational arithmetic and rounded to 20 digits.
const BETA_2_3_N20: [f64; 21] = [
    0.021739130434782608696,
    0.039525691699604743083,
    0.053642010163749294184,
    0.064370412196499153021,
    0.071993224167137210615,
    0.07679277244494635799,
    0.079051383399209486166,
    0.079051383399209486166,
    0.077075098814229249012,
    0.073404856013551665726,
    0.068322981366459627329,
    0.062111801242236024845,
    0.055053642010163749294,
    0.0474308300395256917,
    0.039525691699604743083,
    0.031620553359683794466,
    0.023997741389045736872,
    0.016939582156973461321,
    0.010728402032749858837,
    0.0056465273856578204404,
    0.0019762845849802371542,
];

#[test]
fn beta_binomial_pmf_matches_rational_oracle() {
    let mu = MixingMeasure::beta(2.0, 3.0).unwrap();
    let law = mean_law(&mu, 20, &cfg()).unwrap();
    assert_eq!(law.probs.len(), 21);
    assert!(!law.clamped_tail);
    for (k, want) in BETA_2_3_N20.iter().enumerate() {
        let got = law.probs[k];
        assert!(
            (got - want).abs() < 1e-13,
            "k={k}: got {got:.17e}, want {want:.17e}"
        );
    }
    let sum: f64 = law.probs.iter().sum();
    assert!((sum - 1.0).abs() < 1e-12, "pmf sum {sum}");
}

#[test]
fn power_law_pmf_matches_quadrature_oracle() {
    // singular density at the left edge of [1/2, 3/4]; each cell was
    // integrated independently at 50 digits
    let mu = MixingMeasure::power_law(0.5).unwrap();
    let law = mean_law(&mu, 10, &cfg()).unwrap();
    let bank = [
        (0usize, 0.0003732059521812163141618),
        (5, 0.1989735909716575933258),
        (6, 0.222767328325936295427),
        (7, 0.1870820936611969243669),
        (8, 0.114568928671470592041),
        (10, 0.009336020133742185498486),
    ];
    for (k, want) in bank {
        let got = law.probs[k];
        assert!(
            (got - want).abs() < 1e-10,
            "k={k}: got {got:.17e}, want {want:.17e}"
        );
    }
    let sum: f64 = law.probs.iter().sum();
    assert!((sum - 1.0).abs() < 1e-10, "pmf sum {sum}");
}

#[test]
fn law_of_total_expectation() {
    // E[mean of n draws] = E[theta] for every n, including n = 1 where the
    // law is just Bernoulli(E[theta])
    let cases: Vec<(MixingMeasure, f64)> = vec![
        (MixingMeasure::beta(2.0, 3.0).unwrap(), 0.4),
        (MixingMeasure::power_law(0.2).unwrap(), 0.54166666666666666667),
        (MixingMeasure::power_law(0.8).unwrap(), 0.61111111111111111111),
        (
            MixingMeasure::atomic(vec![(0.3, 0.4), (0.7, 0.6)]).unwrap(),
            0.54,
        ),
    ];
    for (mu, want_mean) in cases {
        assert!((mu.mean().unwrap() - want_mean).abs() < 1e-12, "{mu:?}");
        for n in [1u32, 5, 20] {
            let law = mean_law(&mu, n, &cfg()).unwrap();
            assert!(
                (law.mean() - want_mean).abs() < 1e-10,
                "{mu:?} n={n}: law mean {}",
                law.mean()
            );
            assert!((law.mu_mean - want_mean).abs() < 1e-12);
        }
        let one = mean_law(&mu, 1, &cfg()).unwrap();
        assert!((one.probs[1] - want_mean).abs() < 1e-10);
    }
}

#[test]
fn conditional_variance_split() {
    // Var(mean_n) = Var(theta) + E[theta(1-theta)]/n; with
    // E[theta^2] = E[theta] - E[theta(1-theta)] everything is expressible
    // through the two moment routines, so the check crosses the law builder
    // against the measure-side moments.
    let measures = vec![
        MixingMeasure::beta(2.0, 3.0).unwrap(),
        MixingMeasure::power_law(0.5).unwrap(),
        MixingMeasure::atomic(vec![(0.3, 0.4), (0.7, 0.6)]).unwrap(),
        MixingMeasure::mixture(vec![
            (0.5, MixingMeasure::beta(2.0, 2.0).unwrap()),
            (0.5, MixingMeasure::dirac(0.5).unwrap()),
        ])
        .unwrap(),
    ];
    for mu in measures {
        let mean = mu.mean().unwrap();
        let m11 = mu.moment_theta_one_minus_theta().unwrap();
        let var_theta = mean - m11 - mean * mean;
        for n in [1u32, 6, 25] {
            let law = mean_law(&mu, n, &cfg()).unwrap();
            let var_law = law.second_moment() - law.mean() * law.mean();
            let want = var_theta + m11 / n as f64;
            assert!(
                (var_law - want).abs() < 1e-9,
                "{mu:?} n={n}: got {var_law:.15e}, want {want:.15e}"
            );
        }
    }
}

#[test]
fn underflowing_tail_is_clamped_and_reported() {
    // point mass near 0: cell probabilities for large k underflow f64 and
    // must be zeroed with the flag set, not left as denormal dust
    let mu = MixingMeasure::atomic(vec![(0.001, 1.0)]).unwrap();
    let law = mean_law(&mu, 300, &cfg()).unwrap();
    assert!(law.clamped_tail);
    assert_eq!(law.probs[300], 0.0);
    let sum: f64 = law.probs.iter().sum();
    assert!((sum - 1.0).abs() < 1e-12, "clamp removed only negligible mass");

    let benign = mean_law(&MixingMeasure::beta(2.0, 3.0).unwrap(), 50, &cfg()).unwrap();
    assert!(!benign.clamped_tail);
}

#[test]
fn cdf_is_the_partial_sum_step_function() {
    let mu = MixingMeasure::beta(2.0, 3.0).unwrap();
    let law = mean_law(&mu, 20, &cfg()).unwrap();
    // F(x) jumps exactly at the grid points k/n
    let mut cum = 0.0;
    for k in 0..20usize {
        cum += law.probs[k];
        let x = k as f64 / 20.0;
        assert_eq!(law.cdf(x), cum, "at grid point k={k}");
        assert_eq!(law.cdf(x + 0.024), cum, "inside cell k={k}");
    }
    assert_eq!(law.cdf(-0.1), 0.0);
    // x >= 1 clamps to exactly 1 regardless of summation dust
    assert_eq!(law.cdf(1.0), 1.0);
    assert_eq!(law.cdf(7.0), 1.0);
}
