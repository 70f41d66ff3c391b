//! Rate-fit regression machinery and the constant-comparison helper, tested
//! against synthetic curves with known slopes.

use definetti::MixingMeasure;
use definetti_cli::{compare_constant, exact_rate_grid, fit_rate, log_grid, perturbed_rate_grid};

#[test]
fn recovers_synthetic_slopes_exactly() {
    let ns: Vec<u32> = vec![10, 32, 100, 316, 1000];
    // d = 3/n: slope -1, intercept ln 3
    let d1: Vec<f64> = ns.iter().map(|&n| 3.0 / n as f64).collect();
    let f1 = fit_rate(&ns, &d1).unwrap();
    assert!((f1.slope + 1.0).abs() < 1e-12, "slope {}", f1.slope);
    assert!((f1.intercept - 3.0f64.ln()).abs() < 1e-12);
    assert!(f1.max_residual < 1e-12);

    // d = 0.7/sqrt(n): slope -1/2
    let d2: Vec<f64> = ns.iter().map(|&n| 0.7 / (n as f64).sqrt()).collect();
    let f2 = fit_rate(&ns, &d2).unwrap();
    assert!((f2.slope + 0.5).abs() < 1e-12);

    // mild curvature shows up in max_residual, not in a crash
    let d3: Vec<f64> = ns
        .iter()
        .map(|&n| (1.0 + 0.3 / (n as f64).sqrt()) / n as f64)
        .collect();
    let f3 = fit_rate(&ns, &d3).unwrap();
    assert!((f3.slope + 1.0).abs() < 0.05);
    assert!(f3.max_residual > 1e-6);
}

#[test]
fn fit_rejects_degenerate_inputs() {
    let ns = vec![10u32, 32, 100, 316, 1000];
    let good: Vec<f64> = ns.iter().map(|&n| 1.0 / n as f64).collect();

    assert!(fit_rate(&ns, &good[..4]).is_err(), "length mismatch");
    assert!(fit_rate(&ns[..3], &good[..3]).is_err(), "too few points");
    assert!(
        fit_rate(&[10, 32, 32, 100], &good[..4]).is_err(),
        "non-increasing grid"
    );
    assert!(
        fit_rate(&[10, 20, 40, 80], &good[..4]).is_err(),
        "less than a decade of span"
    );
    let mut bad = good.clone();
    bad[2] = 0.0;
    assert!(fit_rate(&ns, &bad).is_err(), "nonpositive distance");
    bad[2] = f64::NAN;
    assert!(fit_rate(&ns, &bad).is_err(), "non-finite distance");
}

#[test]
fn default_grids_are_log_spaced_and_span_a_decade() {
    let p = perturbed_rate_grid();
    assert_eq!(p.first(), Some(&100));
    assert_eq!(p.last(), Some(&100_000));
    assert!(p.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(p.len(), 12);

    let e = exact_rate_grid();
    assert_eq!(e.first(), Some(&10));
    assert_eq!(e.last(), Some(&1000));
    assert!(e.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(e.len(), 10);

    // rounding collisions collapse rather than duplicate
    let tight = log_grid(1, 12, 30);
    assert!(tight.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(*tight.first().unwrap(), 1);
    assert_eq!(*tight.last().unwrap(), 12);
}

#[test]
fn constant_comparison_is_a_plain_ratio() {
    let mu = MixingMeasure::beta(2.0, 2.0).unwrap();
    // frozen closed-form constant for Beta(2,2)
    let c22 = 2.075912173557430049393;
    assert!((compare_constant(&mu, c22).unwrap() - 1.0).abs() < 1e-12);
    assert!((compare_constant(&mu, 2.0 * c22).unwrap() - 0.5).abs() < 1e-12);

    assert!(compare_constant(&mu, 0.0).is_err());
    assert!(compare_constant(&mu, f64::NAN).is_err());
    let pl = MixingMeasure::power_law(0.5).unwrap();
    assert!(compare_constant(&pl, 1.0).is_err(), "closed form is Beta-only");
}
