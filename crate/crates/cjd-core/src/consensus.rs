//! Leader-following consensus over noisy measurement channels.
//!
//! A leader and `N` identical followers share plant noise; each follower
//! steers towards its neighbors through the protocol
//! `u_i = K sum_j a_ij z_ji` with measurements
//! `z_ji = (x_j - x_i) + (x_i - x_j) xi_ji` corrupted by per-edge
//! multiplicative Brownian and compensated-jump noise. The stacked error
//! `X = (x_1 - x_0, ..., x_N - x_0)` follows a linear-plus-martingale
//! system assembled from the graph Laplacian block `H~` and per-edge
//! selector matrices through Kronecker products with `BK`; the simulator
//! realizes that structure blockwise, so with shared noise streams the
//! error system reproduces the network differences to integrator rounding.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::collections::{BTreeMap, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{BuildError, SimError};
use crate::integrate::{check_finite, IntegratorConfig, JumpSampler};
use crate::levy::LevyMeasure;
use crate::rng::{path_rng, StreamTag};
use crate::runner::run_paths;
use crate::stats::{self, LogSlope};
use crate::{ABSORPTION_RADIUS, DIVERGENCE_RADIUS};

/// Communication topology: node 0 is the leader (it receives nothing),
/// follower-follower links are undirected, and a spanning tree rooted at
/// the leader must reach every follower.
#[derive(Debug, Clone, PartialEq)]
pub struct LeaderFollowerGraph {
    n_followers: usize,
    adjacency: Vec<Vec<u8>>,
    a0: Vec<u8>,
    h_tilde: DMatrix<f64>,
}

impl LeaderFollowerGraph {
    /// Build from a full `(N+1) x (N+1)` 0/1 adjacency matrix with
    /// `adjacency[i][j] = 1` iff agent `i` receives from agent `j`.
    pub fn from_adjacency(adjacency: &[Vec<u8>]) -> Result<Self, BuildError> {
        let m = adjacency.len();
        if m < 2 {
            return Err(BuildError::invariant("need a leader and >= 1 follower"));
        }
        let n = m - 1;
        for (i, row) in adjacency.iter().enumerate() {
            if row.len() != m {
                return Err(BuildError::invariant("adjacency must be square"));
            }
            for (j, &v) in row.iter().enumerate() {
                if v > 1 {
                    return Err(BuildError::invariant("adjacency entries must be 0/1"));
                }
                if i == j && v != 0 {
                    return Err(BuildError::invariant("no self-loops"));
                }
            }
        }
        if adjacency[0].iter().any(|&v| v != 0) {
            return Err(BuildError::invariant(
                "leader row must be zero (the leader receives nothing)",
            ));
        }
        for i in 1..m {
            for j in 1..m {
                if adjacency[i][j] != adjacency[j][i] {
                    return Err(BuildError::invariant(
                        "follower-follower links must be undirected (symmetric block)",
                    ));
                }
            }
        }

        // spanning tree rooted at the leader: BFS over leader->follower
        // edges and undirected follower links
        let mut seen = vec![false; m];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(u) = queue.pop_front() {
            for v in 1..m {
                let connected = if u == 0 {
                    adjacency[v][0] == 1
                } else {
                    adjacency[u][v] == 1
                };
                if connected && !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        if let Some(i) = seen.iter().position(|&s| !s) {
            return Err(BuildError::invariant(format!(
                "no spanning tree rooted at the leader: follower {i} is unreachable"
            )));
        }

        let a0: Vec<u8> = (1..m).map(|i| adjacency[i][0]).collect();
        let mut h = DMatrix::zeros(n, n);
        for i in 1..m {
            let mut deg = 0.0;
            for j in 0..m {
                if j != i {
                    deg += adjacency[i][j] as f64;
                    if j >= 1 {
                        h[(i - 1, j - 1)] = -(adjacency[i][j] as f64);
                    }
                }
            }
            h[(i - 1, i - 1)] = deg;
        }
        Ok(Self {
            n_followers: n,
            adjacency: adjacency.to_vec(),
            a0,
            h_tilde: h,
        })
    }

    /// Parse an adjacency list: one `i j` pair per line meaning agent `i`
    /// receives from agent `j` (node 0 = leader; follower pairs are
    /// symmetrized). `#` starts a comment.
    pub fn from_edge_list(text: &str) -> Result<Self, BuildError> {
        let mut edges = Vec::new();
        let mut max_node = 0usize;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let parse = |tok: Option<&str>| -> Result<usize, BuildError> {
                tok.and_then(|t| t.parse::<usize>().ok()).ok_or_else(|| {
                    BuildError::invariant(format!("line {}: expected `i j`", lineno + 1))
                })
            };
            let i = parse(it.next())?;
            let j = parse(it.next())?;
            if it.next().is_some() {
                return Err(BuildError::invariant(format!(
                    "line {}: expected exactly two node ids",
                    lineno + 1
                )));
            }
            if i == 0 {
                return Err(BuildError::invariant(format!(
                    "line {}: the leader (node 0) cannot receive information",
                    lineno + 1
                )));
            }
            max_node = max_node.max(i).max(j);
            edges.push((i, j));
        }
        let m = max_node + 1;
        let mut adjacency = vec![vec![0u8; m]; m];
        for (i, j) in edges {
            adjacency[i][j] = 1;
            if j >= 1 {
                adjacency[j][i] = 1;
            }
        }
        Self::from_adjacency(&adjacency)
    }

    /// Star topology: the leader broadcasts to every follower.
    pub fn star(n_followers: usize) -> Result<Self, BuildError> {
        let m = n_followers + 1;
        let mut adjacency = vec![vec![0u8; m]; m];
        for i in 1..m {
            adjacency[i][0] = 1;
        }
        Self::from_adjacency(&adjacency)
    }

    /// Chain `0 - 1 - 2 - ... - N` (leader feeds follower 1 only).
    pub fn chain(n_followers: usize) -> Result<Self, BuildError> {
        let m = n_followers + 1;
        let mut adjacency = vec![vec![0u8; m]; m];
        adjacency[1][0] = 1;
        for i in 1..n_followers {
            adjacency[i][i + 1] = 1;
            adjacency[i + 1][i] = 1;
        }
        Self::from_adjacency(&adjacency)
    }

    pub fn n_followers(&self) -> usize {
        self.n_followers
    }

    pub fn adjacency(&self) -> &[Vec<u8>] {
        &self.adjacency
    }

    /// Leader-edge indicator `a0[i-1] = a_{i0}`.
    pub fn a0(&self) -> &[u8] {
        &self.a0
    }

    /// The follower-block Laplacian augmented with leader degrees.
    pub fn h_tilde(&self) -> &DMatrix<f64> {
        &self.h_tilde
    }

    /// Ordered edges `(receiver i, source j)` with `a_ij = 1`, ascending in
    /// `i` then `j` — the canonical noise-stream order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let m = self.n_followers + 1;
        let mut out = Vec::new();
        for i in 1..m {
            for j in 0..m {
                if self.adjacency[i][j] == 1 {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

/// Per-edge selector matrices: `S_ij` has `-a_ij` at `(i,i)` and `+a_ij`
/// at `(i,j)` (follower pairs), `S~_i` has `a_i0` at `(i,i)` (leader
/// edges); indices 1-based agents mapped to 0-based rows. They satisfy
/// `H~ = sum_i S~_i - sum_ij S_ij` exactly.
#[derive(Debug, Clone)]
pub struct SelectorMatrices {
    pub s: Vec<((usize, usize), DMatrix<f64>)>,
    pub s_bar: Vec<(usize, DMatrix<f64>)>,
}

impl SelectorMatrices {
    /// `sum_i S~_i - sum_ij S_ij`, which must reproduce `H~`.
    pub fn reconstruct(&self, n: usize) -> DMatrix<f64> {
        let mut acc = DMatrix::zeros(n, n);
        for (_, m) in &self.s_bar {
            acc += m;
        }
        for (_, m) in &self.s {
            acc -= m;
        }
        acc
    }
}

/// Build the selector matrices of `graph`.
pub fn selector_matrices(graph: &LeaderFollowerGraph) -> SelectorMatrices {
    let n = graph.n_followers();
    let mut s = Vec::new();
    let mut s_bar = Vec::new();
    for (i, j) in graph.edges() {
        if j == 0 {
            let mut m = DMatrix::zeros(n, n);
            m[(i - 1, i - 1)] = 1.0;
            s_bar.push((i, m));
        } else {
            let mut m = DMatrix::zeros(n, n);
            m[(i - 1, i - 1)] = -1.0;
            m[(i - 1, j - 1)] = 1.0;
            s.push(((i, j), m));
        }
    }
    SelectorMatrices { s, s_bar }
}

/// Measurement-noise intensities: Brownian `sigma[(i, j)]` and jump atoms
/// per ordered edge `(receiver i, source j)`. Atoms use scalar marks: the
/// relative jump sizes multiplying the measured difference.
#[derive(Debug, Clone, Default)]
pub struct NoiseModel {
    sigma: BTreeMap<(usize, usize), f64>,
    jumps: BTreeMap<(usize, usize), LevyMeasure>,
}

impl NoiseModel {
    /// Noise-free measurements.
    pub fn none() -> Self {
        Self::default()
    }

    /// One Brownian intensity for every edge of `graph`.
    pub fn uniform_sigma(graph: &LeaderFollowerGraph, sigma: f64) -> Result<Self, BuildError> {
        let mut model = Self::default();
        for (i, j) in graph.edges() {
            model = model.with_sigma(i, j, sigma)?;
        }
        Ok(model)
    }

    pub fn with_sigma(mut self, receiver: usize, source: usize, sigma: f64) -> Result<Self, BuildError> {
        if !sigma.is_finite() {
            return Err(BuildError::invariant("sigma must be finite"));
        }
        self.sigma.insert((receiver, source), sigma);
        Ok(self)
    }

    pub fn with_jumps(
        mut self,
        receiver: usize,
        source: usize,
        atoms: &[(f64, f64)],
    ) -> Result<Self, BuildError> {
        for &(g, _) in atoms {
            if g == -1.0 {
                return Err(BuildError::invariant(
                    "jump sizes must satisfy 1 + ghat != 0 (log statistics would degenerate)",
                ));
            }
        }
        self.jumps
            .insert((receiver, source), LevyMeasure::scalar_atoms(atoms)?);
        Ok(self)
    }

    pub fn sigma(&self, receiver: usize, source: usize) -> f64 {
        self.sigma.get(&(receiver, source)).copied().unwrap_or(0.0)
    }

    pub fn jumps(&self, receiver: usize, source: usize) -> Option<&LevyMeasure> {
        self.jumps.get(&(receiver, source))
    }

    /// Scale every Brownian intensity (jump atoms untouched).
    pub fn scaled_sigma(&self, factor: f64) -> Self {
        Self {
            sigma: self
                .sigma
                .iter()
                .map(|(&k, &v)| (k, v * factor))
                .collect(),
            jumps: self.jumps.clone(),
        }
    }
}

/// The protocol `u_i = K sum_j a_ij z_ji` applied through the input matrix
/// `B`; `K` must be symmetric.
#[derive(Debug, Clone)]
pub struct ConsensusProtocol {
    k: DMatrix<f64>,
    b: DMatrix<f64>,
    bk: DMatrix<f64>,
}

impl ConsensusProtocol {
    pub fn new(k: DMatrix<f64>, b: DMatrix<f64>) -> Result<Self, BuildError> {
        if k.nrows() != k.ncols() || b.nrows() != b.ncols() || k.nrows() != b.nrows() {
            return Err(BuildError::invariant("K and B must be square of equal size"));
        }
        if (&k - k.transpose()).norm() > 1e-10 * (1.0 + k.norm()) {
            return Err(BuildError::invariant("the gain K must be symmetric"));
        }
        let bk = &b * &k;
        Ok(Self { k, b, bk })
    }

    pub fn identity(n: usize) -> Self {
        Self::new(DMatrix::identity(n, n), DMatrix::identity(n, n)).expect("identity is valid")
    }

    pub fn dim(&self) -> usize {
        self.k.nrows()
    }

    pub fn k(&self) -> &DMatrix<f64> {
        &self.k
    }

    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn bk(&self) -> &DMatrix<f64> {
        &self.bk
    }
}

type DriftFn = Arc<dyn Fn(&DVector<f64>) -> DVector<f64> + Send + Sync>;

/// Recorded trajectories of the full network.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkPaths {
    pub times: Vec<f64>,
    pub leader: Vec<DVector<f64>>,
    /// `followers[i][t]`: follower `i+1` at time index `t`.
    pub followers: Vec<Vec<DVector<f64>>>,
}

impl NetworkPaths {
    /// `max_i |x_i(t) - x_0(t)|` along the path.
    pub fn max_error_norms(&self) -> Vec<f64> {
        self.times
            .iter()
            .enumerate()
            .map(|(t, _)| {
                self.followers
                    .iter()
                    .map(|f| (&f[t] - &self.leader[t]).norm())
                    .fold(0.0f64, f64::max)
            })
            .collect()
    }
}

/// Recorded trajectories of the stacked error system (leader included: the
/// error dynamics depend on the leader state through the plant drift).
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorPaths {
    pub times: Vec<f64>,
    pub leader: Vec<DVector<f64>>,
    /// `errors[i][t]`: `x_{i+1} - x_0` at time index `t`.
    pub errors: Vec<Vec<DVector<f64>>>,
}

impl ErrorPaths {
    pub fn max_error_norms(&self) -> Vec<f64> {
        self.times
            .iter()
            .enumerate()
            .map(|(t, _)| {
                self.errors
                    .iter()
                    .map(|e| e[t].norm())
                    .fold(0.0f64, f64::max)
            })
            .collect()
    }
}

struct EdgeStreams {
    edges: Vec<(usize, usize)>,
    samplers: Vec<Option<JumpSampler>>,
    counts: Vec<Vec<u64>>,
    zetas: Vec<f64>,
}

impl EdgeStreams {
    fn new(graph: &LeaderFollowerGraph, noise: &NoiseModel, dt: f64) -> Self {
        let edges = graph.edges();
        let samplers = edges
            .iter()
            .map(|&(i, j)| noise.jumps(i, j).map(|levy| JumpSampler::new(levy, dt)))
            .collect::<Vec<_>>();
        let counts = edges.iter().map(|_| Vec::new()).collect();
        let zetas = vec![0.0; edges.len()];
        Self {
            edges,
            samplers,
            counts,
            zetas,
        }
    }

    /// Draw all per-edge noise for one step in canonical edge order.
    fn draw(&mut self, rng: &mut ChaCha8Rng) {
        for (e, sampler) in self.samplers.iter().enumerate() {
            let z: f64 = rng.sample(StandardNormal);
            self.zetas[e] = z;
            if let Some(s) = sampler {
                let mut counts = core::mem::take(&mut self.counts[e]);
                s.draw(rng, &mut counts);
                self.counts[e] = counts;
            }
        }
    }

    /// Scalar noise increment of edge `e`:
    /// `sigma sqrt(dt) zeta + sum_atoms ghat (count - w dt)`.
    fn increment(&self, e: usize, noise: &NoiseModel, sqrt_dt: f64, dt: f64) -> f64 {
        let (i, j) = self.edges[e];
        let mut eta = noise.sigma(i, j) * sqrt_dt * self.zetas[e];
        if let Some(levy) = noise.jumps(i, j) {
            for (a, (mark, w)) in levy.atoms().iter().enumerate() {
                let k = self.counts[e][a] as f64;
                eta += mark[0] * (k - w * dt);
            }
        }
        eta
    }
}

/// Simulate the full network: leader plus `N` followers under the
/// protocol, all sharing the plant Brownian motion, with independent
/// per-edge measurement noise.
pub fn simulate_network(
    graph: &LeaderFollowerGraph,
    protocol: &ConsensusProtocol,
    noise: &NoiseModel,
    f: &DriftFn,
    x0_init: &DVector<f64>,
    followers_init: &[DVector<f64>],
    cfg: &IntegratorConfig,
    path_index: u64,
) -> Result<NetworkPaths, SimError> {
    cfg.validate()?;
    let n = graph.n_followers();
    let dim = protocol.dim();
    if followers_init.len() != n {
        return Err(SimError::config("followers_init length must equal N"));
    }
    if x0_init.len() != dim || followers_init.iter().any(|x| x.len() != dim) {
        return Err(SimError::config("agent state dimension must match the protocol"));
    }
    let dt = cfg.dt;
    let sqrt_dt = dt.sqrt();
    let n_steps = cfg.n_steps();
    let mut rng = path_rng(cfg.master_seed, path_index, StreamTag::Network);
    let mut streams = EdgeStreams::new(graph, noise, dt);
    let bk = protocol.bk();

    let mut x0 = x0_init.clone();
    let mut xs: Vec<DVector<f64>> = followers_init.to_vec();
    let mut dw = DVector::zeros(dim);

    let mut times = Vec::with_capacity(n_steps / cfg.record_stride + 2);
    let mut leader = Vec::with_capacity(times.capacity());
    let mut followers: Vec<Vec<DVector<f64>>> = vec![Vec::with_capacity(times.capacity()); n];
    times.push(0.0);
    leader.push(x0.clone());
    for (i, x) in xs.iter().enumerate() {
        followers[i].push(x.clone());
    }

    for step in 0..n_steps {
        let t_next = (step + 1) as f64 * dt;
        crate::integrate::draw_gaussian(&mut rng, dim, sqrt_dt, &mut dw);
        streams.draw(&mut rng);

        let x0_new = &x0 + f(&x0) * dt + &dw;
        let mut xs_new = Vec::with_capacity(n);
        for i in 1..=n {
            let xi = &xs[i - 1];
            let mut input = DVector::zeros(dim);
            for (e, &(ri, j)) in streams.edges.iter().enumerate() {
                if ri != i {
                    continue;
                }
                let xj = if j == 0 { &x0 } else { &xs[j - 1] };
                // ideal part (x_j - x_i) dt plus noise (x_i - x_j) eta
                let eta = streams.increment(e, noise, sqrt_dt, dt);
                input += (xj - xi) * dt + (xi - xj) * eta;
            }
            let xi_new = xi + f(xi) * dt + bk * input + &dw;
            xs_new.push(xi_new);
        }
        x0 = x0_new;
        xs = xs_new;
        check_finite(&x0, t_next)?;
        for x in &xs {
            check_finite(x, t_next)?;
        }

        if (step + 1) % cfg.record_stride == 0 || step + 1 == n_steps {
            times.push(t_next);
            leader.push(x0.clone());
            for (i, x) in xs.iter().enumerate() {
                followers[i].push(x.clone());
            }
        }
    }
    Ok(NetworkPaths {
        times,
        leader,
        followers,
    })
}

/// Simulate the stacked error system
/// `dX = (F(x0, X) - (H~ (x) BK) X) dt + martingale terms` blockwise, with
/// the same RNG stream layout as [`simulate_network`]: with shared seeds
/// the trajectories equal the network differences to integrator rounding.
pub fn simulate_error_system(
    graph: &LeaderFollowerGraph,
    protocol: &ConsensusProtocol,
    noise: &NoiseModel,
    f: &DriftFn,
    x0_init: &DVector<f64>,
    error_init: &[DVector<f64>],
    cfg: &IntegratorConfig,
    path_index: u64,
) -> Result<ErrorPaths, SimError> {
    cfg.validate()?;
    let n = graph.n_followers();
    let dim = protocol.dim();
    if error_init.len() != n {
        return Err(SimError::config("error_init length must equal N"));
    }
    if x0_init.len() != dim || error_init.iter().any(|x| x.len() != dim) {
        return Err(SimError::config("agent state dimension must match the protocol"));
    }
    let dt = cfg.dt;
    let sqrt_dt = dt.sqrt();
    let n_steps = cfg.n_steps();
    let mut rng = path_rng(cfg.master_seed, path_index, StreamTag::Network);
    let mut streams = EdgeStreams::new(graph, noise, dt);
    let bk = protocol.bk();
    let zero = DVector::zeros(dim);

    let mut x0 = x0_init.clone();
    let mut es: Vec<DVector<f64>> = error_init.to_vec();
    let mut dw = DVector::zeros(dim);

    let mut times = Vec::with_capacity(n_steps / cfg.record_stride + 2);
    let mut leader = Vec::with_capacity(times.capacity());
    let mut errors: Vec<Vec<DVector<f64>>> = vec![Vec::with_capacity(times.capacity()); n];
    times.push(0.0);
    leader.push(x0.clone());
    for (i, e) in es.iter().enumerate() {
        errors[i].push(e.clone());
    }

    for step in 0..n_steps {
        let t_next = (step + 1) as f64 * dt;
        crate::integrate::draw_gaussian(&mut rng, dim, sqrt_dt, &mut dw);
        streams.draw(&mut rng);

        let f0 = f(&x0);
        let x0_new = &x0 + &f0 * dt + &dw;
        let mut es_new = Vec::with_capacity(n);
        for i in 1..=n {
            let ei = &es[i - 1];
            let mut input = DVector::zeros(dim);
            for (e, &(ri, j)) in streams.edges.iter().enumerate() {
                if ri != i {
                    continue;
                }
                // the leader's error is identically zero
                let ej = if j == 0 { &zero } else { &es[j - 1] };
                let eta = streams.increment(e, noise, sqrt_dt, dt);
                input += (ej - ei) * dt + (ei - ej) * eta;
            }
            // plant-drift mismatch F_i = f(x0 + X_i) - f(x0)
            let ei_new = ei + (f(&(&x0 + ei)) - &f0) * dt + bk * input;
            es_new.push(ei_new);
        }
        x0 = x0_new;
        es = es_new;
        check_finite(&x0, t_next)?;
        for e in &es {
            check_finite(e, t_next)?;
        }

        if (step + 1) % cfg.record_stride == 0 || step + 1 == n_steps {
            times.push(t_next);
            leader.push(x0.clone());
            for (i, e) in es.iter().enumerate() {
                errors[i].push(e.clone());
            }
        }
    }
    Ok(ErrorPaths {
        times,
        leader,
        errors,
    })
}

/// Options of the consentability verdict.
#[derive(Debug, Clone, Copy)]
pub struct VerdictOptions {
    /// A path counts as decaying when its fitted log-slope is at most
    /// `-margin`.
    pub margin: f64,
    /// Norm of the random initial follower displacement.
    pub initial_error: f64,
    /// Required fraction of decaying paths.
    pub decay_quorum: f64,
}

impl Default for VerdictOptions {
    fn default() -> Self {
        Self {
            margin: 0.05,
            initial_error: 1e-3,
            decay_quorum: 0.9,
        }
    }
}

/// Outcome of the consentability test.
#[derive(Debug, Clone)]
pub struct ConsensusReport {
    /// Per-path fitted exponents of `max_i |x_i - x_0|`.
    pub slopes: Vec<f64>,
    pub decaying_fraction: f64,
    pub consentable_indicated: bool,
    pub margin: f64,
    pub diverged: usize,
}

impl ConsensusReport {
    pub fn csv_header() -> &'static str {
        "consentable,decaying_fraction,margin,slope_mean,slope_stderr,diverged"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            self.consentable_indicated,
            self.decaying_fraction,
            self.margin,
            stats::mean(&self.slopes),
            stats::stderr_of_mean(&self.slopes),
            self.diverged
        )
    }
}

/// Fit per-path exponents of the worst follower error started from small
/// random displacements; the verdict is positive when at least
/// `decay_quorum` of the paths decay faster than `margin`.
pub fn consentability_verdict(
    graph: &LeaderFollowerGraph,
    protocol: &ConsensusProtocol,
    noise: &NoiseModel,
    f: &DriftFn,
    cfg: &IntegratorConfig,
    ensemble: usize,
    opts: VerdictOptions,
) -> Result<ConsensusReport, SimError> {
    cfg.validate()?;
    if ensemble == 0 {
        return Err(SimError::config("ensemble must be >= 1"));
    }
    let n = graph.n_followers();
    let dim = protocol.dim();
    let window_start = 0.5 * cfg.effective_horizon();
    let span = cfg.effective_horizon() - window_start;

    let results = run_paths(ensemble, |idx| {
        let mut init_rng = path_rng(cfg.master_seed, idx, StreamTag::Init);
        let x0 = DVector::zeros(dim);
        let followers: Vec<DVector<f64>> = (0..n)
            .map(|_| {
                let mut v = DVector::from_fn(dim, |_, _| {
                    let z: f64 = init_rng.sample(StandardNormal);
                    z
                });
                let norm = v.norm();
                if norm > 0.0 {
                    v /= norm;
                }
                v * opts.initial_error
            })
            .collect();
        simulate_network(graph, protocol, noise, f, &x0, &followers, cfg, idx)
    });

    let mut slopes = Vec::with_capacity(ensemble);
    let mut diverged = 0usize;
    for res in results {
        match res {
            Ok(paths) => {
                let norms = paths.max_error_norms();
                match stats::fit_log_slope(
                    &paths.times,
                    &norms,
                    window_start,
                    ABSORPTION_RADIUS,
                    false,
                    DIVERGENCE_RADIUS,
                ) {
                    LogSlope::Fitted(s) | LogSlope::Absorbed(s) | LogSlope::Diverged(s) => {
                        slopes.push(s)
                    }
                }
            }
            Err(SimError::Diverged { .. }) => {
                diverged += 1;
                slopes.push((DIVERGENCE_RADIUS.ln() - opts.initial_error.ln()) / span);
            }
            Err(e) => return Err(e),
        }
    }
    let decaying_fraction =
        slopes.iter().filter(|&&s| s <= -opts.margin).count() as f64 / slopes.len() as f64;
    Ok(ConsensusReport {
        slopes,
        decaying_fraction,
        consentable_indicated: decaying_fraction >= opts.decay_quorum,
        margin: opts.margin,
        diverged,
    })
}
