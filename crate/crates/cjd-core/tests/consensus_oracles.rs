//! Consensus oracles: error-system/network equivalence under shared
//! streams, linear-rate checks against Kronecker eigenvalues, and the
//! noise-driven loss of consentability.

use std::sync::Arc;

use cjd_core::consensus::{
    consentability_verdict, simulate_error_system, simulate_network, ConsensusProtocol,
    LeaderFollowerGraph, NoiseModel, VerdictOptions,
};
use cjd_core::stats;
use cjd_core::IntegratorConfig;
use nalgebra::{DMatrix, DVector};

type DriftFn = Arc<dyn Fn(&DVector<f64>) -> DVector<f64> + Send + Sync>;

#[test]
fn error_system_reproduces_network_differences() {
    // path graph 0-1-2, measurement noise with jumps on every edge, shared
    // streams: sup-norm agreement at 1e-8 over horizon 1
    let g = LeaderFollowerGraph::chain(2).unwrap();
    let protocol = ConsensusProtocol::new(
        DMatrix::from_row_slice(2, 2, &[0.8, 0.1, 0.1, 0.6]),
        DMatrix::from_row_slice(2, 2, &[1.0, 0.2, 0.0, 1.0]),
    )
    .unwrap();
    let noise = NoiseModel::uniform_sigma(&g, 0.4)
        .unwrap()
        .with_jumps(1, 0, &[(0.3, 2.0)])
        .unwrap()
        .with_jumps(2, 1, &[(-0.2, 1.0)])
        .unwrap();
    let f: DriftFn = Arc::new(|x: &DVector<f64>| {
        DVector::from_column_slice(&[0.3 * x[1] - 0.2 * x[0], -0.4 * x[1]])
    });
    let cfg = IntegratorConfig::new(1e-4, 1.0, 2718).with_stride(10);

    let x0 = DVector::from_column_slice(&[0.2, -0.1]);
    let f1_init = DVector::from_column_slice(&[0.5, 0.1]);
    let f2_init = DVector::from_column_slice(&[-0.3, 0.4]);
    let errors_init = vec![&f1_init - &x0, &f2_init - &x0];

    let net = simulate_network(
        &g,
        &protocol,
        &noise,
        &f,
        &x0,
        &[f1_init, f2_init],
        &cfg,
        7,
    )
    .unwrap();
    let err = simulate_error_system(&g, &protocol, &noise, &f, &x0, &errors_init, &cfg, 7).unwrap();

    assert_eq!(net.times, err.times);
    let mut worst = 0.0f64;
    for t in 0..net.times.len() {
        assert_eq!(net.leader[t], err.leader[t], "leader paths must agree bitwise");
        for i in 0..2 {
            let gap = (&net.followers[i][t] - &net.leader[t] - &err.errors[i][t]).norm();
            worst = worst.max(gap);
        }
    }
    assert!(worst <= 1e-8, "max deviation {worst}");
}

#[test]
fn star_graph_noiseless_error_decays_at_unit_rate() {
    // H~ = I, B = K = I, f = 0: every error decays like e^{-t}
    let g = LeaderFollowerGraph::star(3).unwrap();
    let protocol = ConsensusProtocol::identity(1);
    let noise = NoiseModel::none();
    let f: DriftFn = Arc::new(|x: &DVector<f64>| DVector::zeros(x.len()));
    let cfg = IntegratorConfig::new(1e-3, 8.0, 11).with_stride(10);
    let x0 = DVector::zeros(1);
    let followers = vec![
        DVector::from_element(1, 1.0),
        DVector::from_element(1, -0.5),
        DVector::from_element(1, 0.25),
    ];
    let paths = simulate_network(&g, &protocol, &noise, &f, &x0, &followers, &cfg, 0).unwrap();
    let norms = paths.max_error_norms();
    let slope = stats::fit_log_slope(&paths.times, &norms, 4.0, 1e-300, false, 1e12).value();
    assert!((slope + 1.0).abs() < 0.02, "slope {slope}");
}

#[test]
fn linear_plant_error_rate_matches_kronecker_eigenvalues() {
    // f(x) = a x: the noiseless stacked error follows
    // dX = (a I - H~ (x) BK) X dt; the worst-error slope converges to the
    // top eigenvalue of the symmetric part
    let g = LeaderFollowerGraph::chain(3).unwrap();
    let bk_scalar = 0.7;
    let protocol = ConsensusProtocol::new(
        DMatrix::from_element(1, 1, bk_scalar),
        DMatrix::identity(1, 1),
    )
    .unwrap();
    let noise = NoiseModel::none();
    let a = 0.3;
    let f: DriftFn = Arc::new(move |x: &DVector<f64>| x * a);
    let cfg = IntegratorConfig::new(1e-3, 20.0, 12).with_stride(10);
    let x0 = DVector::zeros(1);
    let errors = vec![
        DVector::from_element(1, 0.31),
        DVector::from_element(1, -0.17),
        DVector::from_element(1, 0.44),
    ];
    let err = simulate_error_system(&g, &protocol, &noise, &f, &x0, &errors, &cfg, 0).unwrap();
    let norms = err.max_error_norms();
    let slope = stats::fit_log_slope(&err.times, &norms, 10.0, 1e-300, false, 1e12).value();

    let m = DMatrix::identity(3, 3) * a - g.h_tilde().kronecker(protocol.bk());
    let sym = (&m + m.transpose()) * 0.5;
    let want = sym.symmetric_eigenvalues().max();
    assert!(
        (slope - want).abs() < 0.02,
        "slope {slope} vs top eigenvalue {want}"
    );
}

#[test]
fn stable_linear_plant_with_small_noise_is_consentable() {
    // contraction plant with identity protocol and weak measurement noise
    let g = LeaderFollowerGraph::star(3).unwrap();
    let protocol = ConsensusProtocol::identity(2);
    let noise = NoiseModel::uniform_sigma(&g, 0.05).unwrap();
    let f: DriftFn = Arc::new(|x: &DVector<f64>| x * -1.0);
    let cfg = IntegratorConfig::new(1e-3, 10.0, 13).with_stride(10);
    let report =
        consentability_verdict(&g, &protocol, &noise, &f, &cfg, 32, VerdictOptions::default())
            .unwrap();
    assert!(
        report.consentable_indicated,
        "fraction {}",
        report.decaying_fraction
    );
}

#[test]
fn zero_gain_expanding_plant_is_not_consentable() {
    let g = LeaderFollowerGraph::star(2).unwrap();
    let protocol =
        ConsensusProtocol::new(DMatrix::zeros(1, 1), DMatrix::identity(1, 1)).unwrap();
    let noise = NoiseModel::none();
    let f: DriftFn = Arc::new(|x: &DVector<f64>| x * 0.2);
    let cfg = IntegratorConfig::new(1e-3, 10.0, 14).with_stride(10);
    let report =
        consentability_verdict(&g, &protocol, &noise, &f, &cfg, 32, VerdictOptions::default())
            .unwrap();
    assert!(!report.consentable_indicated);
    assert!(report.slopes.iter().all(|&s| s >= 0.0), "{:?}", report.slopes);
}

/// Two followers linked to the leader and each other: the selector
/// matrices do not commute, so strong measurement noise mixes error modes
/// and destroys the exponential decay.
fn triangle() -> LeaderFollowerGraph {
    LeaderFollowerGraph::from_edge_list("1 0\n2 0\n1 2\n").unwrap()
}

#[test]
fn hundredfold_noise_flips_the_marginal_verdict() {
    let g = triangle();
    let protocol = ConsensusProtocol::new(
        DMatrix::from_element(1, 1, 0.5),
        DMatrix::identity(1, 1),
    )
    .unwrap();
    let f: DriftFn = Arc::new(|x: &DVector<f64>| x * 0.4);
    let cfg = IntegratorConfig::new(1e-3, 16.0, 15).with_stride(10);

    let quiet = NoiseModel::uniform_sigma(&g, 0.05).unwrap();
    let report =
        consentability_verdict(&g, &protocol, &quiet, &f, &cfg, 32, VerdictOptions::default())
            .unwrap();
    assert!(
        report.consentable_indicated,
        "quiet fraction {}",
        report.decaying_fraction
    );

    let loud = quiet.scaled_sigma(100.0);
    let report =
        consentability_verdict(&g, &protocol, &loud, &f, &cfg, 32, VerdictOptions::default())
            .unwrap();
    assert!(
        !report.consentable_indicated,
        "loud fraction {}",
        report.decaying_fraction
    );
}

#[test]
fn relabeling_followers_leaves_the_exponent_distribution_invariant() {
    // conjugating H~ by a permutation is a relabeling of the same network;
    // the slope samples must look alike (two-sample KS sanity)
    let protocol = ConsensusProtocol::identity(1);
    let f: DriftFn = Arc::new(|x: &DVector<f64>| x * -0.2);
    let cfg = IntegratorConfig::new(1e-3, 10.0, 16).with_stride(10);
    let noise_of = |g: &LeaderFollowerGraph| NoiseModel::uniform_sigma(g, 0.3).unwrap();

    let g1 = LeaderFollowerGraph::from_edge_list("1 0\n1 2\n2 3\n").unwrap();
    // relabel followers (1,2,3) -> (3,1,2)
    let g2 = LeaderFollowerGraph::from_edge_list("3 0\n3 1\n1 2\n").unwrap();

    let slopes = |g: &LeaderFollowerGraph| {
        consentability_verdict(
            g,
            &protocol,
            &noise_of(g),
            &f,
            &cfg,
            48,
            VerdictOptions::default(),
        )
        .unwrap()
        .slopes
    };
    let mut a = slopes(&g1);
    let mut b = slopes(&g2);
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());

    // two-sample Kolmogorov-Smirnov statistic
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    assert!(d < 0.35, "KS statistic {d} too large: {a:?} vs {b:?}");

    // and the Laplacians are genuinely conjugate: same eigenvalues
    let e1 = g1.h_tilde().symmetric_eigenvalues();
    let e2 = g2.h_tilde().symmetric_eigenvalues();
    let mut e1: Vec<f64> = e1.iter().copied().collect();
    let mut e2: Vec<f64> = e2.iter().copied().collect();
    e1.sort_by(|x, y| x.partial_cmp(y).unwrap());
    e2.sort_by(|x, y| x.partial_cmp(y).unwrap());
    for (x, y) in e1.iter().zip(&e2) {
        assert!((x - y).abs() < 1e-12);
    }
}
