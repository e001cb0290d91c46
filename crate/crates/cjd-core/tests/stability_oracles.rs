//! Stability-module oracles: invariant-measure moments, functional
//! averages, exponent closed forms, and verdicts on the epidemic benchmark.

use cjd_core::benchmarks::{self, SirParams};
use cjd_core::stability::{
    estimate_invariant_measure, estimate_lambda, estimate_log_lyapunov_exponent,
    stability_verdict, StabilityHypotheses, Verdict,
};
use cjd_core::IntegratorConfig;
use nalgebra::DVector;

/// Closed-form exponential rate of the scalar linear jump diffusion
/// `dX = a X dt + s X dW + X sum_atoms ghat dN~`.
fn scalar_exponent(a: f64, s: f64, atoms: &[(f64, f64)]) -> f64 {
    a - s * s / 2.0
        + atoms
            .iter()
            .map(|&(g, w)| w * ((1.0 + g).abs().ln() - g))
            .sum::<f64>()
}

#[test]
fn ou_invariant_measure_second_moment() {
    for (theta, sigma) in [(1.0, (2.0f64).sqrt()), (0.5, 1.0)] {
        let sys = benchmarks::scalar_linear(theta, sigma, &[], 0.0, 0.0, &[], 0.0).unwrap();
        let cfg = IntegratorConfig::new(1e-2, 500.0, 21).with_stride(5);
        let x1 = DVector::zeros(1);
        let occ = estimate_invariant_measure(&sys, &x1, &cfg, 4).unwrap();
        let (m2, _) = estimate_lambda(&occ, &|x: &DVector<f64>| x[0] * x[0]).unwrap();
        let want = sigma * sigma / (2.0 * theta);
        assert!(
            (m2 - want).abs() < 0.05 * want,
            "theta {theta}: second moment {m2} vs {want}"
        );
        // symmetric stationary law: the mean vanishes within CI
        let (m1, se1) = estimate_lambda(&occ, &|x: &DVector<f64>| x[0]).unwrap();
        assert!(m1.abs() < 4.0 * se1.max(1e-3), "mean {m1} +- {se1}");
    }
}

#[test]
fn sir_noiseless_boundary_settles_at_fixed_point() {
    // dS = (c0 - c1 S) dt without noise: mass concentrates at c0/c1
    let p = SirParams {
        sigma1: 0.0,
        gamma1_atoms: vec![],
        gamma2_atoms: vec![],
        ..SirParams::default()
    };
    let sys = p.system().unwrap();
    let cfg = IntegratorConfig::new(1e-2, 100.0, 3).with_stride(10);
    let x1 = DVector::from_element(1, 3.0);
    let occ = estimate_invariant_measure(&sys, &x1, &cfg, 2).unwrap();
    let (mean_s, _) = estimate_lambda(&occ, &|x: &DVector<f64>| x[0]).unwrap();
    let want = p.c0 / p.c1;
    assert!((mean_s - want).abs() < 1e-3, "mean {mean_s} vs {want}");

    // the extinction functional's boundary average has the sign of its
    // noiseless plug-in value at s = c0/c1
    let f1 = p.f1();
    let (lam, _) = estimate_lambda(&occ, &*f1).unwrap();
    let plug_in = f1(&DVector::from_element(1, want));
    assert!(lam.signum() == plug_in.signum() && plug_in > 0.0);
}

#[test]
fn exponent_closed_forms() {
    let cases: [(f64, f64, &[(f64, f64)]); 3] = [
        (-1.0, 0.0, &[]),                 // pure decay: -1
        (0.5, std::f64::consts::SQRT_2, &[]), // a - s^2/2 = -0.5
        (0.0, 0.0, &[(-0.5, 1.0)]),       // ln(0.5) + 0.5 = -0.1931...
    ];
    for (a, s, atoms) in cases {
        let sys = benchmarks::scalar_linear(0.0, 0.0, &[], a, s, atoms, 0.0).unwrap();
        let cfg = IntegratorConfig::new(1e-3, 100.0, 11).with_stride(100);
        let x1 = DVector::zeros(1);
        let x2 = DVector::from_element(1, 1.0);
        let est = estimate_log_lyapunov_exponent(&sys, (&x1, &x2), &cfg, 32).unwrap();
        let want = scalar_exponent(a, s, atoms);
        assert!(
            (est.mean - want).abs() < 0.05,
            "(a={a}, s={s}): measured {} vs {want}",
            est.mean
        );
    }
}

#[test]
fn lambda_estimates_are_seed_independent() {
    let sys = benchmarks::scalar_linear(1.0, 1.0, &[(0.3, 1.0)], 0.0, 0.0, &[], 0.0).unwrap();
    let x1 = DVector::zeros(1);
    let f = |x: &DVector<f64>| x[0] * x[0];
    let run = |seed: u64| {
        let cfg = IntegratorConfig::new(1e-2, 400.0, seed).with_stride(5);
        let occ = estimate_invariant_measure(&sys, &x1, &cfg, 4).unwrap();
        estimate_lambda(&occ, &f).unwrap()
    };
    let (a, sa) = run(1001);
    let (b, sb) = run(2002);
    let combined = (sa * sa + sb * sb).sqrt();
    assert!(
        (a - b).abs() < 3.0 * combined,
        "{a} +- {sa} vs {b} +- {sb}"
    );
}

fn sir_hypotheses(p: &SirParams) -> StabilityHypotheses {
    // V0 = V1 = 1 + s^2 dominates |f1| + f2 on the population state space
    // (the susceptible pool is nonnegative; the incidence ratio has a pole
    // at negative s outside the model's domain)
    let f1 = p.f1();
    StabilityHypotheses::builder(1, 1)
        .v0(|x: &DVector<f64>| 1.0 + x[0] * x[0])
        .v1(|x: &DVector<f64>| 1.0 + x[0] * x[0])
        .f1_field(f1)
        .f2(|_| 1.0)
        .delta0(0.5)
        .c_sigma(10.0)
        .k5(10.0)
        .x1_domain(|x: &DVector<f64>| x[0] >= 0.0)
        .build()
        .unwrap()
}

#[test]
fn sir_stable_regime_verdict_and_decay() {
    let p = SirParams::default();
    let sys = p.system().unwrap();
    let cfg = IntegratorConfig::new(1e-3, 40.0, 40).with_stride(50);
    let x1 = DVector::from_element(1, 1.0);
    let occ = estimate_invariant_measure(&sys, &x1, &cfg, 8).unwrap();
    let hyp = sir_hypotheses(&p);
    let report = stability_verdict(&sys, &hyp, &occ, &cfg).unwrap();
    assert_eq!(report.verdict, Verdict::Stable, "{report:?}");
    assert!(report.gamma0.unwrap() > 0.0);
    assert!(report.exponent.0 < 0.0, "{report:?}");
    assert_eq!(report.agreement, Some(true), "{report:?}");
}

#[test]
fn sir_high_contact_regime_is_not_stable() {
    let p = SirParams {
        c3: 5.0,
        ..SirParams::default()
    };
    let sys = p.system().unwrap();
    let cfg = IntegratorConfig::new(1e-3, 40.0, 41).with_stride(50);
    let x1 = DVector::from_element(1, 1.0);
    let occ = estimate_invariant_measure(&sys, &x1, &cfg, 8).unwrap();
    let hyp = sir_hypotheses(&p);
    let report = stability_verdict(&sys, &hyp, &occ, &cfg).unwrap();
    assert_ne!(report.verdict, Verdict::Stable, "{report:?}");
    assert!(report.lambda1.0 < 0.0, "{report:?}");
}

#[test]
fn verdict_monotone_in_constant_f1_shift() {
    // adding a positive constant to f1 can only move the verdict towards
    // stable (Lambda1 strictly increases, the cross-check is unchanged)
    let sys = benchmarks::scalar_linear(1.0, 0.5, &[], -1.0, 0.2, &[], 0.0).unwrap();
    let cfg = IntegratorConfig::new(1e-2, 60.0, 17).with_stride(5);
    let x1 = DVector::zeros(1);
    let occ = estimate_invariant_measure(&sys, &x1, &cfg, 4).unwrap();

    let make_hyp = |c: f64| {
        StabilityHypotheses::builder(1, 1)
            .v0(|_| 1.0)
            .v1(|_| 100.0)
            .f1(move |_| c)
            .f2(|_| 1.0)
            .delta0(0.5)
            .build()
            .unwrap()
    };
    let base = stability_verdict(&sys, &make_hyp(0.4), &occ, &cfg).unwrap();
    assert_eq!(base.verdict, Verdict::Stable);
    for c in [0.9, 1.4, 2.4] {
        let shifted = stability_verdict(&sys, &make_hyp(c), &occ, &cfg).unwrap();
        assert_eq!(shifted.verdict, Verdict::Stable);
        assert!(shifted.lambda1.0 > base.lambda1.0);
    }
}

#[test]
fn lyapunov_report_csv_round_trips_fields() {
    let sys = benchmarks::scalar_linear(1.0, 0.5, &[], -1.0, 0.0, &[], 0.0).unwrap();
    let cfg = IntegratorConfig::new(1e-2, 50.0, 23).with_stride(5);
    let x1 = DVector::zeros(1);
    let occ = estimate_invariant_measure(&sys, &x1, &cfg, 4).unwrap();
    let hyp = StabilityHypotheses::builder(1, 1)
        .v0(|_| 1.0)
        .v1(|_| 10.0)
        .f1(|_| 1.0)
        .f2(|_| 1.0)
        .delta0(0.5)
        .build()
        .unwrap();
    let report = stability_verdict(&sys, &hyp, &occ, &cfg).unwrap();
    let header = cjd_core::stability::LyapunovReport::csv_header();
    let row = report.csv_row();
    assert_eq!(
        header.split(',').count(),
        row.split(',').count(),
        "header and row column counts must agree"
    );
    assert!(row.contains("stable"));
}
