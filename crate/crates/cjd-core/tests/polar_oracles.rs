//! Polar-decomposition oracles: sphere geometry of the angular process,
//! the tangency identity, and log-radius drift closed forms.

use std::sync::Arc;

use cjd_core::benchmarks;
use cjd_core::integrate::IntegratorConfig;
use cjd_core::levy::LevyMeasure;
use cjd_core::polar::{
    coeff_g1, coeff_g2, coeff_g3, simulate_boundary_sphere_system, sphere_occupation,
    stability_integral, H4Variant, LinearizedCoefficients, PolarState,
};
use cjd_core::stability::estimate_log_lyapunov_exponent;
use nalgebra::{DMatrix, DVector};

fn unit(v: &[f64]) -> DVector<f64> {
    let v = DVector::from_column_slice(v);
    let n = v.norm();
    v / n
}

fn scalar_lin(b: f64, s: f64) -> LinearizedCoefficients {
    LinearizedCoefficients::new(
        1,
        1,
        vec![Arc::new(move |_: &DVector<f64>| DMatrix::from_element(1, 1, s)) as Arc<_>],
        Arc::new(move |_: &DVector<f64>| DMatrix::from_element(1, 1, b)),
        Arc::new(|_: &DVector<f64>, mark: &DVector<f64>| DMatrix::from_element(1, 1, mark[0])),
    )
    .unwrap()
}

fn scalar_exponent(a: f64, s: f64, atoms: &[(f64, f64)]) -> f64 {
    a - s * s / 2.0
        + atoms
            .iter()
            .map(|&(g, w)| w * ((1.0 + g).abs().ln() - g))
            .sum::<f64>()
}

#[test]
fn power_method_flow_converges_to_top_eigenvector() {
    // symmetric B2 = diag(2, 1), no noise: theta flows to +-e1
    let lin = benchmarks::planar_lin((2.0, 1.0), 0.0, 0.0, 0.0).unwrap();
    let nu2 = LevyMeasure::none(1);
    let boundary = benchmarks::scalar_linear(1.0, 0.0, &[], 0.0, 0.0, &[], 0.0).unwrap();
    let cfg = IntegratorConfig::new(1e-3, 20.0, 5).with_stride(1000);
    let y1 = DVector::zeros(1);
    let theta0 = unit(&[0.6, 0.8]);
    let path =
        simulate_boundary_sphere_system(&lin, &nu2, &boundary, &y1, &theta0, &cfg, 0).unwrap();
    let theta_end = &path.final_state().1;
    assert!(
        theta_end[0].abs() > 0.9999,
        "theta did not align with e1: {theta_end:?}"
    );
}

#[test]
fn skew_generator_rotates_at_unit_speed() {
    let lin = benchmarks::planar_lin((0.0, 0.0), 1.0, 0.0, 0.0).unwrap();
    let nu2 = LevyMeasure::none(1);
    let boundary = benchmarks::scalar_linear(1.0, 0.0, &[], 0.0, 0.0, &[], 0.0).unwrap();
    let cfg = IntegratorConfig::new(1e-4, 1.0, 5).with_stride(100);
    let y1 = DVector::zeros(1);
    let theta0 = unit(&[1.0, 0.0]);
    let path =
        simulate_boundary_sphere_system(&lin, &nu2, &boundary, &y1, &theta0, &cfg, 0).unwrap();
    for (t, (_, theta)) in path.times().iter().zip(path.states()) {
        assert!(
            (theta.norm() - 1.0).abs() <= 1e-9,
            "sphere preservation failed at t={t}"
        );
        let want = DVector::from_column_slice(&[t.cos(), t.sin()]);
        assert!(
            (theta - &want).norm() < 5e-3,
            "t={t}: theta {theta:?} vs rotation {want:?}"
        );
    }
}

#[test]
fn sphere_preserved_under_noise_and_jumps() {
    let lin = benchmarks::planar_lin((0.5, -0.5), 1.0, 0.7, 0.8).unwrap();
    let nu2 = LevyMeasure::scalar_atoms(&[(0.4, 2.0)]).unwrap();
    let boundary =
        benchmarks::scalar_linear(1.0, 1.0, &[(0.2, 1.0)], 0.0, 0.0, &[], 0.0).unwrap();
    let cfg = IntegratorConfig::new(1e-3, 10.0, 6).with_stride(7);
    let y1 = DVector::zeros(1);
    let theta0 = unit(&[0.3, -0.95]);
    let path =
        simulate_boundary_sphere_system(&lin, &nu2, &boundary, &y1, &theta0, &cfg, 3).unwrap();
    for (_, theta) in path.states() {
        assert!((theta.norm() - 1.0).abs() <= 1e-9);
    }
}

#[test]
fn radial_drift_of_the_angular_step_vanishes() {
    // the drift of |theta|^2 under (g1, g2, g3) must vanish identically:
    // 2 th' g1 + |g2|_F^2 + sum w (|th + g3|^2 - 1 - 2 th' g3) = 0
    let lin = benchmarks::planar_lin((1.3, -0.4), 0.8, 0.6, 0.9).unwrap();
    let nu2 = LevyMeasure::scalar_atoms(&[(0.5, 1.2), (-0.3, 0.7)]).unwrap();
    let mut rng_t = 0.1f64;
    for k in 0..25 {
        let y1 = DVector::from_element(1, (k as f64) * 0.37 - 4.0);
        rng_t += 0.7;
        let theta = unit(&[rng_t.cos(), rng_t.sin()]);
        let g1 = coeff_g1(&lin, &y1, &theta, &nu2).unwrap();
        let g2 = coeff_g2(&lin, &y1, &theta);
        let mut drift = 2.0 * theta.dot(&g1) + g2.norm_squared();
        for (mark, w) in nu2.atoms() {
            let g3 = coeff_g3(&lin, &y1, &theta, mark).unwrap();
            let moved = &theta + &g3;
            drift += w * (moved.norm_squared() - 1.0 - 2.0 * theta.dot(&g3));
        }
        assert!(
            drift.abs() < 1e-12,
            "radial drift {drift} at sample {k} must vanish"
        );
    }
}

#[test]
fn scalar_stability_integral_equals_twice_the_exponent_formula() {
    // l2 = 1: the generator-variant integral is a closed-form constant and
    // must equal twice the scalar exponent exactly (floating rounding only,
    // no statistical tolerance)
    let (b, s) = (0.35, 0.8);
    let atoms = [(0.5, 1.3), (-0.4, 0.6)];
    let lin = scalar_lin(b, s);
    let nu2 = LevyMeasure::scalar_atoms(&atoms).unwrap();
    let boundary = benchmarks::scalar_linear(1.0, 1.0, &[], 0.0, 0.0, &[], 0.0).unwrap();
    let cfg = IntegratorConfig::new(1e-2, 5.0, 9).with_stride(10);
    let y1 = DVector::zeros(1);
    let theta0 = DVector::from_element(1, 1.0);
    let occ = sphere_occupation(&lin, &nu2, &boundary, &y1, &theta0, &cfg, 2).unwrap();
    let (integral, _) = stability_integral(&lin, &occ, &nu2, H4Variant::Generator).unwrap();
    let want = 2.0 * scalar_exponent(b, s, &atoms);
    assert!(
        (integral - want).abs() <= 1e-12 * (1.0 + want.abs()),
        "integral {integral} vs 2x exponent {want}"
    );

    // pure diffusion: the integral is exactly -s^2, theta-independent
    let lin = scalar_lin(0.0, s);
    let occ = sphere_occupation(
        &lin,
        &LevyMeasure::none(1),
        &boundary,
        &y1,
        &theta0,
        &cfg,
        2,
    )
    .unwrap();
    let (integral, se) =
        stability_integral(&lin, &occ, &LevyMeasure::none(1), H4Variant::Generator).unwrap();
    assert!((integral + s * s).abs() <= 1e-12);
    assert!(se.abs() <= 1e-12);
}

#[test]
fn diagonal_benchmark_integral_is_twice_the_top_eigenvalue() {
    // B2 = diag(-1, -2), no noise: theta settles at e1 and the integral
    // converges to 2 * (-1)
    let lin = benchmarks::planar_lin((-1.0, -2.0), 0.0, 0.0, 0.0).unwrap();
    let nu2 = LevyMeasure::none(1);
    let boundary = benchmarks::scalar_linear(1.0, 0.0, &[], 0.0, 0.0, &[], 0.0).unwrap();
    let cfg = IntegratorConfig::new(1e-3, 60.0, 10).with_stride(100);
    let y1 = DVector::zeros(1);
    let theta0 = unit(&[0.8, 0.6]);
    let occ = sphere_occupation(&lin, &nu2, &boundary, &y1, &theta0, &cfg, 1).unwrap();
    let (integral, _) = stability_integral(&lin, &occ, &nu2, H4Variant::Generator).unwrap();
    assert!(
        (integral + 2.0).abs() < 2e-2,
        "integral {integral} vs -2 (top eigenvalue doubled)"
    );
}

#[test]
fn planar_occupation_integral_matches_direct_radius_slope() {
    // 2-D skew + diagonal benchmark with anisotropic noise and an isotropic
    // jump: the occupation average of the generator-variant drift halves to
    // the measured exponential rate of |Y2| from direct simulation
    let lin = benchmarks::planar_lin((-0.5, -1.5), 1.0, 0.4, 0.0).unwrap();
    let nu2 = LevyMeasure::scalar_atoms(&[(0.2, 0.5)]).unwrap();
    let sys = benchmarks::linearized_system(1.0, 1.0, &lin, &nu2).unwrap();

    let cfg_occ = IntegratorConfig::new(1e-3, 150.0, 31).with_stride(20);
    let y1 = DVector::zeros(1);
    let theta0 = unit(&[1.0, 0.4]);
    let occ = sphere_occupation(&lin, &nu2, &sys, &y1, &theta0, &cfg_occ, 8).unwrap();
    let (integral, int_se) = stability_integral(&lin, &occ, &nu2, H4Variant::Generator).unwrap();

    let cfg_dir = IntegratorConfig::new(1e-3, 150.0, 32).with_stride(20);
    let y2_0 = DVector::from_column_slice(&[1e-3, 5e-4]);
    let est = estimate_log_lyapunov_exponent(&sys, (&y1, &y2_0), &cfg_dir, 32).unwrap();

    let predicted = integral / 2.0;
    let tol = 0.05 + 2.0 * (est.stderr + int_se / 2.0);
    assert!(
        (est.mean - predicted).abs() < tol,
        "direct slope {} vs half-integral {predicted} (tol {tol})",
        est.mean
    );
}

#[test]
fn polar_state_round_trip() {
    let y2 = DVector::from_column_slice(&[3.0, -4.0]);
    let ps = PolarState::from_cartesian(DVector::zeros(1), &y2).unwrap();
    assert!((ps.r - 25.0).abs() < 1e-12);
    assert!((ps.theta.norm() - 1.0).abs() < 1e-15);
    assert!((ps.to_y2() - y2).norm() < 1e-12);
    assert!(PolarState::from_cartesian(DVector::zeros(1), &DVector::zeros(2)).is_err());
}
