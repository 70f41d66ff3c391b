//! Frozen reference values for the distance engine, computed with
//! independent extended-precision/rational tooling and pinned here.

use definetti::{
    chen_bound_check, dk_mean_vs_prior, dual_lower_bound_abs, dual_lower_bound_psi,
    dw_mean_vs_prior, dw_perturbed_prior, mean_law, MixingMeasure, QuadratureConfig,
};

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn dw(mu: &MixingMeasure, n: u32) -> f64 {
    let law = mean_law(mu, n, &cfg()).unwrap();
    dw_mean_vs_prior(&law, mu).unwrap()
}

fn dk(mu: &MixingMeasure, n: u32) -> f64 {
    let law = mean_law(mu, n, &cfg()).unwrap();
    dk_mean_vs_prior(&law, mu).unwrap()
}

#[test]
fn wasserstein_beta_reference_values() {
    let cases: [(f64, f64, u32, f64); 5] = [
        (2.0, 3.0, 10, 0.04274539752883660834581),
        (2.0, 2.0, 5, 0.07583549729333336885918),
        (2.0, 2.0, 10, 0.04029492639248656287191),
        (2.0, 2.0, 50, 0.008566397148183793248583),
        (0.5, 0.5, 5, 0.04761858493533580890708),
    ];
    for (a, b, n, want) in cases {
        let mu = MixingMeasure::beta(a, b).unwrap();
        let got = dw(&mu, n);
        assert!(
            (got - want).abs() < 1e-11,
            "dw Beta({a},{b}) n={n}: got {got:.17e}, want {want:.17e}"
        );
    }
}

#[test]
fn kolmogorov_beta_reference_values() {
    let mu23 = MixingMeasure::beta(2.0, 3.0).unwrap();
    let got = dk(&mu23, 10);
    let want = 0.1298893106893106893107;
    assert!((got - want).abs() < 1e-12, "got {got:.17e}");

    let muh = MixingMeasure::beta(0.5, 0.5).unwrap();
    let got = dk(&muh, 5);
    assert!((got - 0.24609375).abs() < 1e-13, "got {got:.17e}"); // 63/256
}

#[test]
fn power_law_reference_values() {
    let pl5 = MixingMeasure::power_law(0.5).unwrap();
    let got = dw(&pl5, 10);
    assert!(
        (got - 0.08027200591865849424446).abs() < 1e-10,
        "dw got {got:.17e}"
    );
    let got = dk(&pl5, 10);
    assert!(
        (got - 0.4198629224459626184332).abs() < 1e-10,
        "dk got {got:.17e}"
    );
    let got = dw(&pl5, 50);
    assert!(
        (got - 0.02415696222548819593207).abs() < 1e-10,
        "dw n=50 got {got:.17e}"
    );
    let pl2 = MixingMeasure::power_law(0.2).unwrap();
    let got = dw(&pl2, 7);
    assert!(
        (got - 0.125223387906804835004).abs() < 1e-10,
        "gamma=0.2 got {got:.17e}"
    );
}

#[test]
fn atomic_reference_values_exact_rational() {
    // two atoms, n = 6: every quantity is a finite decimal
    let mu = MixingMeasure::atomic(vec![(0.3, 0.4), (0.7, 0.6)]).unwrap();
    let law = mean_law(&mu, 6, &cfg()).unwrap();
    assert!((law.probs[2] - 0.165375).abs() < 1e-14);
    assert!((law.probs[4] - 0.218295).abs() < 1e-14);
    let got = dw_mean_vs_prior(&law, &mu).unwrap();
    assert!((got - 0.127044).abs() < 1e-12, "dw got {got:.17e}");
    let got = dk_mean_vs_prior(&law, &mu).unwrap();
    assert!((got - 0.343521).abs() < 1e-12, "dk got {got:.17e}");
}

#[test]
fn perturbed_prior_reference_values() {
    let b22 = MixingMeasure::beta(2.0, 2.0).unwrap();
    let cases = [
        (10u32, 3.332347489521321e-2),
        (50, 7.291064167831443e-3),
        (100, 3.695870083518785e-3),
    ];
    for (n, want) in cases {
        let got = dw_perturbed_prior(&b22, n, &cfg()).unwrap();
        assert!(
            (got - want).abs() < 5e-10,
            "Beta(2,2) n={n}: got {got:.17e}, want {want:.17e}"
        );
    }
    let pl5 = MixingMeasure::power_law(0.5).unwrap();
    let cases = [(10u32, 7.681891415186097e-2), (100, 1.426982646491143e-2)];
    for (n, want) in cases {
        let got = dw_perturbed_prior(&pl5, n, &cfg()).unwrap();
        assert!(
            (got - want).abs() < 2e-9,
            "PowerLaw(0.5) n={n}: got {got:.17e}, want {want:.17e}"
        );
    }
}

#[test]
fn dual_abs_reference_and_symmetric_equality() {
    let b22 = MixingMeasure::beta(2.0, 2.0).unwrap();
    let got = dual_lower_bound_abs(&b22, 25).unwrap();
    assert!(
        (got - 1.421665680493225e-2).abs() < 1e-12,
        "got {got:.17e}"
    );
    // symmetric prior: the perturbed CDF crosses the prior CDF once, at 1/2,
    // so |x - 1/2| is the optimal Kantorovich potential and the duality
    // lower bound is attained
    for n in [10u32, 50, 100] {
        let lower = dual_lower_bound_abs(&b22, n).unwrap();
        let d = dw_perturbed_prior(&b22, n, &cfg()).unwrap();
        assert!(
            (lower - d).abs() < 1e-9,
            "n={n}: dual {lower:.15e} vs dw {d:.15e}"
        );
    }
    // asymmetric support right of 1/2: |x - 1/2| is no longer the optimal
    // potential, so the bound is strict but not attained
    let pl5 = MixingMeasure::power_law(0.5).unwrap();
    let lower = dual_lower_bound_abs(&pl5, 10).unwrap();
    let d = dw_perturbed_prior(&pl5, 10, &cfg()).unwrap();
    assert!(lower > 0.0);
    assert!(lower <= d);
    assert!(d - lower > 1e-4, "expected a slack gap, got {}", d - lower);
}

#[test]
fn dual_psi_equals_moment_over_n() {
    // E[psi(mean)] - E[psi(theta)] with psi = x(x-1) collapses to
    // E[theta(1-theta)]/n; check across measure kinds
    let measures = [
        MixingMeasure::beta(2.5, 1.5).unwrap(),
        MixingMeasure::power_law(0.5).unwrap(),
        MixingMeasure::atomic(vec![(0.3, 0.4), (0.7, 0.6)]).unwrap(),
    ];
    for mu in &measures {
        let m11 = mu.moment_theta_one_minus_theta().unwrap();
        for n in [1u32, 7, 40] {
            let law = mean_law(mu, n, &cfg()).unwrap();
            let psi = dual_lower_bound_psi(&law, mu).unwrap();
            assert!(
                (psi - m11 / n as f64).abs() < 1e-10,
                "{mu} n={n}: {psi} vs {}",
                m11 / n as f64
            );
        }
    }
}

#[test]
fn chen_reference_values() {
    let cases = [
        (0.5, 1u32, 0.5353773215478798376524, 1.0),
        (0.3, 4, 0.2959876489411011210519, 0.6328318816843779056717),
        (0.5, 16, 0.1256000285108094255047, 0.25),
    ];
    for (t, n, lhs_want, rhs_want) in cases {
        let (lhs, rhs) = chen_bound_check(t, n).unwrap();
        assert!(
            (lhs - lhs_want).abs() < 1e-12,
            "lhs t={t} n={n}: got {lhs:.17e}"
        );
        assert!(
            (rhs - rhs_want).abs() < 1e-14,
            "rhs t={t} n={n}: got {rhs:.17e}"
        );
        assert!(lhs <= rhs);
    }
}

#[test]
fn equivalence_gap_beta22_n10() {
    // |dw_exact - dw_perturbed| against its moment bound, on frozen numbers
    let dw_e: f64 = 0.04029492639248656287191;
    let dw_p: f64 = 3.332347489521321e-2;
    let b22 = MixingMeasure::beta(2.0, 2.0).unwrap();
    let gap_bound = b22.moment_sq_plus_comp_sq().unwrap() / 10.0;
    assert!((dw_e - dw_p).abs() <= gap_bound);
    // live computation agrees with the frozen pair
    let got_e = dw(&b22, 10);
    let got_p = dw_perturbed_prior(&b22, 10, &cfg()).unwrap();
    assert!((got_e - got_p).abs() <= gap_bound);
}

#[test]
fn boundary_mass_scaling() {
    // mixing an atom at 0 with weight q scales d_W by (1-q) against the
    // boundary-killed measure
    let b22 = MixingMeasure::beta(2.0, 2.0).unwrap();
    let base = dw(&b22, 20);
    for q in [0.25, 0.5] {
        let mixed = MixingMeasure::mixture(vec![
            (q, MixingMeasure::dirac(0.0).unwrap()),
            (1.0 - q, b22.clone()),
        ])
        .unwrap();
        let got = dw(&mixed, 20);
        assert!(
            (got - (1.0 - q) * base).abs() < 1e-10,
            "q={q}: got {got:.15e}, want {:.15e}",
            (1.0 - q) * base
        );
        // and kill_boundary recovers the interior measure's distance
        let (interior, qq) = mixed.kill_boundary().unwrap();
        assert!((qq - q).abs() < 1e-14);
        assert!((dw(&interior, 20) - base).abs() < 1e-11);
    }
}
