//! Integrator-level oracles: martingale structure of compensated jumps,
//! closed-form moments, and the deterministic weak-order check.

use cjd_core::benchmarks;
use cjd_core::runner::run_paths;
use cjd_core::stats;
use cjd_core::{simulate_path, IntegratorConfig};
use nalgebra::DVector;

/// Ensemble mean and standard error of `X2(horizon)` over `n` paths.
fn terminal_x2_stats(
    sys: &cjd_core::CoupledJumpDiffusion,
    x2_0: f64,
    cfg: &IntegratorConfig,
    n: usize,
) -> (f64, f64) {
    let x1 = DVector::zeros(1);
    let x2 = DVector::from_element(1, x2_0);
    let finals: Vec<f64> = run_paths(n, |idx| {
        simulate_path(sys, (&x1, &x2), cfg, idx)
            .expect("path must not diverge")
            .final_state()
            .1[0]
    });
    (stats::mean(&finals), stats::stderr_of_mean(&finals))
}

#[test]
fn compensated_jump_is_mean_preserving() {
    // dX2 = X2 * 0.5 dN~ with one atom of weight 1: E X2(1) = X2(0)
    let sys = benchmarks::scalar_linear(0.0, 0.0, &[], 0.0, 0.0, &[(0.5, 1.0)], 0.0).unwrap();
    let cfg = IntegratorConfig::new(1e-3, 1.0, 2024).with_stride(1000);
    let (mean, se) = terminal_x2_stats(&sys, 1.0, &cfg, 10_000);
    assert!(
        (mean - 1.0).abs() < 3.0 * se,
        "mean {mean}, se {se}: compensated jump integral must be a martingale"
    );
}

#[test]
fn drift_free_mixed_noise_is_mean_preserving() {
    // diffusion + compensated jumps, no drift: ensemble mean at the horizon
    // equals the initial state within 3 standard errors
    let sys = benchmarks::scalar_linear(0.0, 0.0, &[], 0.0, 0.6, &[(0.4, 2.0), (-0.3, 1.0)], 0.0)
        .unwrap();
    let cfg = IntegratorConfig::new(1e-3, 1.0, 99).with_stride(1000);
    let (mean, se) = terminal_x2_stats(&sys, 1.0, &cfg, 10_000);
    assert!(
        (mean - 1.0).abs() < 3.0 * se,
        "mean {mean}, se {se}: drift-free dynamics must preserve the mean"
    );
}

#[test]
fn compensator_shifts_log_mean_by_closed_form() {
    // E ln X(t) = w (ln(1+ghat) - ghat) t for the pure-jump multiplicative
    // system (the Brownian-free log drift)
    let (ghat, w) = (0.5f64, 1.0f64);
    let horizon = 2.0;
    let sys = benchmarks::scalar_linear(0.0, 0.0, &[], 0.0, 0.0, &[(ghat, w)], 0.0).unwrap();
    let cfg = IntegratorConfig::new(1e-3, horizon, 7).with_stride(2000);
    let x1 = DVector::zeros(1);
    let x2 = DVector::from_element(1, 1.0);
    let logs: Vec<f64> = run_paths(10_000, |idx| {
        simulate_path(&sys, (&x1, &x2), &cfg, idx).unwrap().final_state().1[0].ln()
    });
    let mean = stats::mean(&logs);
    let se = stats::stderr_of_mean(&logs);
    let want = w * ((1.0 + ghat).ln() - ghat) * horizon;
    // 3 sigma plus the O(dt) weak bias of the scheme
    let tol = 3.0 * se + 5e-3;
    assert!(
        (mean - want).abs() < tol,
        "mean {mean}, want {want}, tol {tol}"
    );
}

#[test]
fn ou_long_run_variance_matches_stationary_law() {
    // dX1 = -X1 dt + sqrt(2) dW: stationary variance sigma^2/(2 theta) = 1
    let sys = benchmarks::scalar_linear(1.0, (2.0f64).sqrt(), &[], 0.0, 0.0, &[], 0.0).unwrap();
    let cfg = IntegratorConfig::new(1e-2, 1e3, 5).with_stride(10);
    let x1 = DVector::zeros(1);
    let path = cjd_core::simulate_boundary_x1(&sys, &x1, &cfg, 0).unwrap();
    let xs: Vec<f64> = path
        .times()
        .iter()
        .zip(path.states())
        .filter(|(t, _)| **t > 100.0)
        .map(|(_, (x1, _))| x1[0])
        .collect();
    let var = stats::variance(&xs);
    assert!((var - 1.0).abs() < 0.05, "sample variance {var}");
}

#[test]
fn deterministic_flow_has_first_order_global_error() {
    // no-noise exponential decay: global error at the horizon scales ~ dt
    let sys = benchmarks::scalar_linear(0.0, 0.0, &[], -1.0, 0.0, &[], 0.0).unwrap();
    let x1 = DVector::zeros(1);
    let x2 = DVector::from_element(1, 1.0);
    let exact = (-1.0f64).exp();
    let mut errors = Vec::new();
    for dt in [1e-2, 5e-3, 2.5e-3] {
        let cfg = IntegratorConfig::new(dt, 1.0, 3).with_stride(100000);
        let path = simulate_path(&sys, (&x1, &x2), &cfg, 0).unwrap();
        errors.push((path.final_state().1[0] - exact).abs());
    }
    // halving dt should roughly halve the error
    for w in errors.windows(2) {
        let ratio = w[0] / w[1];
        assert!(
            (1.5..3.0).contains(&ratio),
            "error ratio {ratio} outside first-order band ({errors:?})"
        );
    }
}

#[test]
fn jump_log_records_arrivals() {
    // high-rate atom: expect about w * horizon arrivals recorded
    let sys = benchmarks::scalar_linear(0.0, 0.0, &[], 0.0, 0.0, &[(0.1, 50.0)], 0.0).unwrap();
    let cfg = IntegratorConfig::new(1e-3, 1.0, 17).with_stride(1000);
    let x1 = DVector::zeros(1);
    let x2 = DVector::from_element(1, 1.0);
    let path = simulate_path(&sys, (&x1, &x2), &cfg, 0).unwrap();
    let n = path.jump_log().len() as f64;
    assert!((20.0..100.0).contains(&n), "got {n} arrivals for rate 50");
    assert!(path
        .jump_log()
        .iter()
        .all(|e| e.channel == cjd_core::integrate::Channel::Two && e.atom == 0));
}
