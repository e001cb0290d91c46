//! The synchronously coupled auxiliary triple `(X1, X1~, X2~)` and its
//! diagnostics.
//!
//! `X1` runs the boundary dynamics; `X1~` runs the true component-1
//! dynamics plus a relaxation drift `lambda (X1 - X1~)` and consumes the
//! *same* component-1 noise increments as `X1`; `X2~` runs the true
//! component-2 dynamics on independent noise. The triple quantifies how
//! fast the interacting component, started near the boundary, merges with
//! the boundary process: the decay statistic
//! `E sup_{t <= tau_delta} e^{lambda0 t} |X1 - X1~|^2` stays proportional
//! to `(|gap0| + delta)^2`, and the squared Girsanov drift
//! `v = lambda sigma1^{-1}(X1, 0)(X1 - X1~)` integrates to a budget that is
//! small with high probability.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};

use crate::error::{BuildError, SimError};
use crate::integrate::{
    check_finite, draw_gaussian, step_component, IntegratorConfig, JumpSampler, PathSample,
};
use crate::rng::{path_rng, StreamTag};
use crate::runner::run_paths;
use crate::stats;
use crate::system::CoupledJumpDiffusion;

/// Relative singular-value cutoff below which a diffusion matrix is treated
/// as rank deficient when forming its right inverse.
const RANK_CUTOFF: f64 = 1e-10;

/// Parameters of the coupling construction. All invariants are validated:
/// `lambda > 20 (1 + K2)`, `lambda0 in (0, gamma0/4)`, `varsigma0 > 0`,
/// and `C_alpha0` dominates `t^2 e^{-alpha0 t / 2}` (checked on a grid).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingConfig {
    /// Relaxation gain of the coupled copy.
    pub lambda: f64,
    /// Exponential weight of the decay statistic, in `(0, gamma0/4)`.
    pub lambda0: f64,
    /// Decay rate of the stopping envelope `delta e^{-gamma0 t}`.
    pub gamma0: f64,
    /// Margin `(Lambda1 - m0 gamma0) / 3`.
    pub varsigma0: f64,
    /// Exponential-martingale tilt `varsigma0 / (2 C_alpha0 Lambda2)`.
    pub alpha: f64,
    /// Constant with `t^2 e^{alpha0 t / 2} <= C_alpha0 e^{alpha0 t}`.
    pub c_alpha0: f64,
    /// Envelope size of the stopping time.
    pub delta: f64,
    /// Jump-growth constant entering the lower bound on `lambda`.
    pub k2: f64,
    /// The `alpha0` the `C_alpha0` check ran against.
    pub alpha0: f64,
}

impl CouplingConfig {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        lambda: f64,
        lambda0: f64,
        gamma0: f64,
        varsigma0: f64,
        alpha: f64,
        c_alpha0: f64,
        delta: f64,
        k2: f64,
        alpha0: f64,
    ) -> Result<Self, BuildError> {
        if !(lambda > 20.0 * (1.0 + k2)) {
            return Err(BuildError::invariant(format!(
                "relaxation gain lambda = {lambda} must exceed 20 (1 + K2) = {}",
                20.0 * (1.0 + k2)
            )));
        }
        if !(gamma0 > 0.0 && gamma0.is_finite()) {
            return Err(BuildError::invariant("gamma0 must be positive"));
        }
        if !(lambda0 > 0.0 && lambda0 < gamma0 / 4.0) {
            return Err(BuildError::invariant(
                "lambda0 must lie in (0, gamma0 / 4)",
            ));
        }
        if !(varsigma0 > 0.0) {
            return Err(BuildError::invariant("varsigma0 must be positive"));
        }
        if !(alpha > 0.0) {
            return Err(BuildError::invariant("alpha must be positive"));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(BuildError::invariant("delta must be positive"));
        }
        if c_alpha0 <= 1.0 {
            return Err(BuildError::invariant("C_alpha0 must exceed 1"));
        }
        // grid check of t^2 e^{-alpha0 t/2} <= C_alpha0
        let mut t = 0.0;
        while t <= 8.0 / alpha0 + 10.0 {
            if t * t * (-alpha0 * t / 2.0).exp() > c_alpha0 {
                return Err(BuildError::invariant(format!(
                    "C_alpha0 = {c_alpha0} does not dominate t^2 e^(-alpha0 t/2) at t = {t}"
                )));
            }
            t += 0.05;
        }
        Ok(Self {
            lambda,
            lambda0,
            gamma0,
            varsigma0,
            alpha,
            c_alpha0,
            delta,
            k2,
            alpha0,
        })
    }

    /// Derive a config from estimated functionals: `gamma0 = Lambda1/(2 m0)`
    /// (the midpoint of the admissible interval), `lambda = 25 (1 + K2)`
    /// (strictly above the required bound), `lambda0 = gamma0 / 8`,
    /// `varsigma0 = (Lambda1 - m0 gamma0)/3`, `C_alpha0` the grid supremum
    /// of `t^2 e^{-alpha0 t/2}` (at least `1 + 1e-6`), and
    /// `alpha = varsigma0 / (2 C_alpha0 Lambda2)`.
    pub fn derive(
        lambda1: f64,
        lambda2: f64,
        m0: f64,
        alpha0: f64,
        k2: f64,
        delta: f64,
    ) -> Result<Self, BuildError> {
        if !(lambda1 > 0.0) {
            return Err(BuildError::invariant(
                "deriving a coupling config needs Lambda1 > 0",
            ));
        }
        if !(lambda2 > 0.0) {
            return Err(BuildError::invariant(
                "deriving a coupling config needs Lambda2 > 0",
            ));
        }
        if !(m0 > 0.0 && alpha0 > 0.0) {
            return Err(BuildError::invariant("m0 and alpha0 must be positive"));
        }
        let gamma0 = lambda1 / (2.0 * m0);
        let varsigma0 = (lambda1 - m0 * gamma0) / 3.0;
        // supremum of t^2 e^{-alpha0 t / 2} sits at t = 4 / alpha0
        let sup = (4.0 / alpha0).powi(2) * (-2.0f64).exp();
        let c_alpha0 = sup.max(1.0) * (1.0 + 1e-6);
        let alpha = varsigma0 / (2.0 * c_alpha0 * lambda2);
        Self::new(
            25.0 * (1.0 + k2),
            gamma0 / 8.0,
            gamma0,
            varsigma0,
            alpha,
            c_alpha0,
            delta,
            k2,
            alpha0,
        )
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }
}

/// A simulated triple. The boundary and tilde paths share the time grid
/// (every step is recorded) and, within the triple, the component-1 noise
/// stream.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledTriple {
    boundary: PathSample,
    tilde: PathSample,
    /// Cumulative `int_0^{t ∧ tau_delta} |v|^2 ds` on the shared grid,
    /// accumulated with the `(gamma0, delta)` the triple was simulated
    /// with. `None` when `sigma1` admitted no bounded right inverse along
    /// the path (degenerate-diffusion benchmarks have no drift budget).
    v_sq_budget: Option<Vec<f64>>,
}

impl CoupledTriple {
    /// Boundary path `X1` (second component identically zero).
    pub fn boundary(&self) -> &PathSample {
        &self.boundary
    }

    /// Coupled copy `(X1~, X2~)`.
    pub fn tilde(&self) -> &PathSample {
        &self.tilde
    }

    pub fn times(&self) -> &[f64] {
        self.boundary.times()
    }

    /// Squared gaps `|X1(t) - X1~(t)|^2` along the grid.
    pub fn gap_sq(&self) -> Vec<f64> {
        self.boundary
            .states()
            .iter()
            .zip(self.tilde.states())
            .map(|((x1, _), (x1t, _))| (x1 - x1t).norm_squared())
            .collect()
    }

    /// Cumulative squared-drift budget along the grid, when defined.
    pub fn v_sq_budget(&self) -> Option<&[f64]> {
        self.v_sq_budget.as_deref()
    }

    /// Total budget `int_0^{horizon ∧ tau_delta} |v|^2 ds`, when defined.
    pub fn total_budget(&self) -> Option<f64> {
        self.v_sq_budget.as_ref().map(|b| *b.last().unwrap_or(&0.0))
    }
}

/// Least-squares right inverse of `m` with a relative singular-value
/// cutoff; errors when `m` is numerically rank deficient (the bounded
/// right-inverse hypothesis fails at this point).
pub fn right_inverse(m: &DMatrix<f64>, context: &str) -> Result<DMatrix<f64>, SimError> {
    let svd = m.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let rows = m.nrows();
    // full row rank needs the rows-th singular value above the cutoff
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let ok = smax > 0.0 && sv.len() >= rows && sv[rows - 1] > RANK_CUTOFF * smax;
    if !ok {
        return Err(SimError::RankDeficient(format!(
            "{context}: diffusion matrix admits no bounded right inverse \
             (sigma_min/sigma_max below {RANK_CUTOFF:e})"
        )));
    }
    svd.pseudo_inverse(RANK_CUTOFF * smax)
        .map_err(|e| SimError::RankDeficient(String::from(e)))
}

/// The change-of-measure drift
/// `v(t) = lambda sigma1^{-1}(X1(t), 0) (X1(t) - X1~(t))`.
pub fn girsanov_drift(
    system: &CoupledJumpDiffusion,
    ccfg: &CouplingConfig,
    x1: &DVector<f64>,
    x1_tilde: &DVector<f64>,
) -> Result<DVector<f64>, SimError> {
    let zero2 = DVector::zeros(system.dims().l2);
    let s1 = system.diff1().eval_mat(x1, &zero2, None);
    let inv = right_inverse(&s1, "sigma1 at the boundary")?;
    Ok(inv * (x1 - x1_tilde) * ccfg.lambda)
}

/// Simulate the coupled triple. Every step is recorded (the stopping time
/// and the drift budget are grid-level diagnostics), so `cfg.record_stride`
/// is ignored here.
pub fn simulate_coupled_triple(
    system: &CoupledJumpDiffusion,
    x1_0: &DVector<f64>,
    z_tilde_0: (&DVector<f64>, &DVector<f64>),
    ccfg: &CouplingConfig,
    cfg: &IntegratorConfig,
    path_index: u64,
) -> Result<CoupledTriple, SimError> {
    cfg.validate()?;
    let d = system.dims();
    if x1_0.len() != d.l1 || z_tilde_0.0.len() != d.l1 || z_tilde_0.1.len() != d.l2 {
        return Err(SimError::config("initial state dimensions do not match system dims"));
    }
    let dt = cfg.dt;
    let sqrt_dt = dt.sqrt();
    let n_steps = cfg.n_steps();
    let mut rng = path_rng(cfg.master_seed, path_index, StreamTag::Triple);

    let sampler1 = JumpSampler::new(system.levy1(), dt);
    let sampler2 = JumpSampler::new(system.levy2(), dt);
    let zero2 = DVector::zeros(d.l2);

    let mut x1 = x1_0.clone();
    let mut x1t = z_tilde_0.0.clone();
    let mut x2t = z_tilde_0.1.clone();
    let mut dw1 = DVector::zeros(d.d1);
    let mut dw2 = DVector::zeros(d.d2);
    let mut counts1: Vec<u64> = Vec::new();
    let mut counts2: Vec<u64> = Vec::new();
    let mut disp: Vec<DVector<f64>> = Vec::new();
    let mut disp_t: Vec<DVector<f64>> = Vec::new();
    let mut disp2: Vec<DVector<f64>> = Vec::new();

    let mut times = Vec::with_capacity(n_steps + 1);
    let mut b_states = Vec::with_capacity(n_steps + 1);
    let mut t_states = Vec::with_capacity(n_steps + 1);
    let mut budget = Vec::with_capacity(n_steps + 1);
    times.push(0.0);
    b_states.push((x1.clone(), zero2.clone()));
    t_states.push((x1t.clone(), x2t.clone()));
    budget.push(0.0);

    let mut breached = x2t.norm() >= ccfg.delta;
    let mut acc_budget = 0.0;
    let mut budget_valid = true;

    for step in 0..n_steps {
        let t_next = (step + 1) as f64 * dt;

        // shared component-1 draws, then independent component-2 draws
        draw_gaussian(&mut rng, d.d1, sqrt_dt, &mut dw1);
        sampler1.draw(&mut rng, &mut counts1);
        draw_gaussian(&mut rng, d.d2, sqrt_dt, &mut dw2);
        sampler2.draw(&mut rng, &mut counts2);

        if budget_valid && !breached {
            match girsanov_drift(system, ccfg, &x1, &x1t) {
                Ok(v) => acc_budget += v.norm_squared() * dt,
                Err(SimError::RankDeficient(_)) => budget_valid = false,
                Err(e) => return Err(e),
            }
        }

        // boundary copy at (x1, 0)
        let b1 = system.drift1().eval_vec(&x1, &zero2, None);
        let s1dw = system.diff1().eval_mat(&x1, &zero2, None) * &dw1;
        disp.clear();
        for (mark, _) in system.levy1().atoms() {
            disp.push(system.jump1().eval_vec(&x1, &zero2, Some(mark)));
        }

        // coupled copy at (x1t, x2t), with the relaxation drift; identical
        // noise products so that coincident copies stay bit-identical
        let mut b1t = system.drift1().eval_vec(&x1t, &x2t, None);
        b1t.axpy(ccfg.lambda, &(&x1 - &x1t), 1.0);
        let s1tdw = system.diff1().eval_mat(&x1t, &x2t, None) * &dw1;
        disp_t.clear();
        for (mark, _) in system.levy1().atoms() {
            disp_t.push(system.jump1().eval_vec(&x1t, &x2t, Some(mark)));
        }

        let b2t = system.drift2().eval_vec(&x1t, &x2t, None);
        let s2tdw = system.diff2().eval_mat(&x1t, &x2t, None) * &dw2;
        disp2.clear();
        for (mark, _) in system.levy2().atoms() {
            disp2.push(system.jump2().eval_vec(&x1t, &x2t, Some(mark)));
        }

        step_component(&mut x1, &b1, &s1dw, &disp, &counts1, system.levy1(), dt);
        step_component(&mut x1t, &b1t, &s1tdw, &disp_t, &counts1, system.levy1(), dt);
        step_component(&mut x2t, &b2t, &s2tdw, &disp2, &counts2, system.levy2(), dt);

        check_finite(&x1, t_next)?;
        check_finite(&x1t, t_next)?;
        check_finite(&x2t, t_next)?;

        if !breached && x2t.norm() >= ccfg.delta * (-ccfg.gamma0 * t_next).exp() {
            breached = true;
        }

        times.push(t_next);
        b_states.push((x1.clone(), zero2.clone()));
        t_states.push((x1t.clone(), x2t.clone()));
        budget.push(acc_budget);
    }

    Ok(CoupledTriple {
        boundary: PathSample::new(times.clone(), b_states, Vec::new()),
        tilde: PathSample::new(times, t_states, Vec::new()),
        v_sq_budget: budget_valid.then_some(budget),
    })
}

/// First grid time at which `|X2~(t)| >= delta e^{-gamma0 t}`, or `None`
/// when the envelope holds on the whole horizon.
pub fn stopping_time_tau_delta(triple: &CoupledTriple, ccfg: &CouplingConfig) -> Option<f64> {
    for (t, (_, x2t)) in triple.times().iter().zip(triple.tilde.states()) {
        if x2t.norm() >= ccfg.delta * (-ccfg.gamma0 * t).exp() {
            return Some(*t);
        }
    }
    None
}

/// One grid point of the decay experiment.
#[derive(Debug, Clone)]
pub struct DecayGridPoint {
    pub x1_0: DVector<f64>,
    pub x1_tilde_0: DVector<f64>,
    pub delta: f64,
}

#[derive(Debug, Clone)]
pub struct DecayRow {
    pub gap0: f64,
    pub delta: f64,
    /// Monte-Carlo mean of `sup_{t <= tau_delta} e^{lambda0 t} |X1 - X1~|^2`.
    pub mean_sup: f64,
    /// `mean_sup / (gap0 + delta)^2`.
    pub ratio: f64,
    pub ratio_stderr: f64,
}

/// Decay report over a grid of initial gaps and envelope sizes; the max
/// ratio across the grid estimates the universal proportionality constant.
#[derive(Debug, Clone)]
pub struct CouplingDecayReport {
    pub rows: Vec<DecayRow>,
    pub c_tilde_hat: f64,
}

impl CouplingDecayReport {
    pub fn csv_header() -> &'static str {
        "gap0,delta,mean_sup,ratio,ratio_stderr"
    }

    pub fn csv_rows(&self) -> Vec<String> {
        self.rows
            .iter()
            .map(|r| {
                format!(
                    "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                    r.gap0, r.delta, r.mean_sup, r.ratio, r.ratio_stderr
                )
            })
            .collect()
    }
}

/// Monte-Carlo estimate of the coupling decay statistic on a grid.
///
/// For each grid point the coupled copy starts at `x2~(0) = (delta/2) e1`
/// (inside the envelope); each path contributes
/// `sup_{t <= tau_delta ∧ horizon} e^{lambda0 t} |X1(t) - X1~(t)|^2`.
pub fn estimate_coupling_decay(
    system: &CoupledJumpDiffusion,
    grid: &[DecayGridPoint],
    ccfg: &CouplingConfig,
    cfg: &IntegratorConfig,
    ensemble: usize,
) -> Result<CouplingDecayReport, SimError> {
    if grid.is_empty() {
        return Err(SimError::Empty(String::from("decay grid is empty")));
    }
    if ensemble == 0 {
        return Err(SimError::config("ensemble must be >= 1"));
    }
    let d = system.dims();
    let mut rows = Vec::with_capacity(grid.len());
    let mut c_tilde_hat = 0.0f64;
    for (g_idx, g) in grid.iter().enumerate() {
        let ccfg_g = ccfg.with_delta(g.delta);
        let mut x2t0 = DVector::zeros(d.l2);
        x2t0[0] = g.delta / 2.0;
        let sups = run_paths(ensemble, |idx| {
            let triple = simulate_coupled_triple(
                system,
                &g.x1_0,
                (&g.x1_tilde_0, &x2t0),
                &ccfg_g,
                cfg,
                (g_idx as u64) << 32 | idx,
            )?;
            let tau = stopping_time_tau_delta(&triple, &ccfg_g);
            let mut sup = 0.0f64;
            for ((t, gap_sq), _) in triple
                .times()
                .iter()
                .zip(triple.gap_sq())
                .zip(0..)
                .take_while(|((t, _), _)| tau.map(|tau| **t <= tau).unwrap_or(true))
            {
                sup = sup.max((ccfg_g.lambda0 * t).exp() * gap_sq);
            }
            Ok::<f64, SimError>(sup)
        });
        let mut vals = Vec::with_capacity(ensemble);
        for s in sups {
            vals.push(s?);
        }
        let denom = (g.x1_0.clone() - &g.x1_tilde_0).norm() + g.delta;
        let denom_sq = denom * denom;
        let mean_sup = stats::mean(&vals);
        let stderr = stats::stderr_of_mean(&vals);
        let ratio = mean_sup / denom_sq;
        c_tilde_hat = c_tilde_hat.max(ratio);
        rows.push(DecayRow {
            gap0: (g.x1_0.clone() - &g.x1_tilde_0).norm(),
            delta: g.delta,
            mean_sup,
            ratio,
            ratio_stderr: if stderr.is_nan() { 0.0 } else { stderr / denom_sq },
        });
    }
    Ok(CouplingDecayReport { rows, c_tilde_hat })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks;

    fn test_ccfg(delta: f64) -> CouplingConfig {
        CouplingConfig::derive(1.0, 1.0, 1.0, 1.0, 0.0, delta).unwrap()
    }

    #[test]
    fn lambda_bound_enforced() {
        // k2 = 1 requires lambda > 40
        let bad = CouplingConfig::new(30.0, 0.05, 1.0, 0.1, 0.1, 2.3, 0.1, 1.0, 1.0);
        assert!(bad.is_err());
        let ok = CouplingConfig::new(45.0, 0.05, 1.0, 0.1, 0.1, 2.3, 0.1, 1.0, 1.0);
        assert!(ok.is_ok());
    }

    #[test]
    fn coincident_initials_stay_bit_identical() {
        let sys = benchmarks::scalar_linear(1.0, 0.8, &[(0.3, 1.5)], -0.5, 0.6, &[(0.4, 1.0)], 0.4)
            .unwrap();
        let ccfg = test_ccfg(0.1);
        let cfg = IntegratorConfig::new(1e-3, 1.0, 31);
        let x1 = DVector::from_element(1, 0.7);
        let zero = DVector::zeros(1);
        let triple = simulate_coupled_triple(&sys, &x1, (&x1, &zero), &ccfg, &cfg, 0).unwrap();
        for ((b, _), (t, x2t)) in triple.boundary().states().iter().zip(triple.tilde().states())
        {
            assert_eq!(b, t, "boundary and coupled copy must coincide bitwise");
            assert_eq!(x2t[0], 0.0);
        }
        assert_eq!(stopping_time_tau_delta(&triple, &ccfg), None);
        assert_eq!(triple.total_budget(), Some(0.0));
    }

    #[test]
    fn deterministic_gap_decays_at_combined_rate() {
        // b1 = -x1, no noise: gap' = -(1 + lambda) gap; the degenerate
        // sigma1 leaves the drift budget undefined but must not block the
        // simulation itself
        let sys = benchmarks::scalar_linear(1.0, 0.0, &[], 0.0, 0.0, &[], 0.0).unwrap();
        let ccfg = CouplingConfig::derive(1.0, 1.0, 1.0, 1.0, 0.0, 0.5).unwrap();
        let cfg = IntegratorConfig::new(1e-4, 0.2, 5);
        let x1 = DVector::from_element(1, 1.0);
        let x1t = DVector::zeros(1);
        let x2t = DVector::zeros(1);
        let triple = simulate_coupled_triple(&sys, &x1, (&x1t, &x2t), &ccfg, &cfg, 0).unwrap();
        assert_eq!(triple.total_budget(), None);
        let lam = 1.0 + ccfg.lambda;
        for (t, gap_sq) in triple.times().iter().zip(triple.gap_sq()) {
            let want = (-lam * t).exp();
            let got = gap_sq.sqrt();
            assert!(
                (got - want).abs() < 2e-2 * want.max(1e-6),
                "t={t}: got {got}, want {want}"
            );
        }
    }

    #[test]
    fn tau_examples() {
        let sys = benchmarks::scalar_linear(1.0, 1.0, &[], -5.0, 0.0, &[], 0.0).unwrap();
        let ccfg = test_ccfg(0.1);
        let cfg = IntegratorConfig::new(1e-3, 1.0, 9);
        let x1 = DVector::zeros(1);

        // x2~(0) above delta: breached at t = 0
        let big = DVector::from_element(1, 0.2);
        let triple = simulate_coupled_triple(&sys, &x1, (&x1, &big), &ccfg, &cfg, 0).unwrap();
        assert_eq!(stopping_time_tau_delta(&triple, &ccfg), Some(0.0));

        // x2~ decaying faster than the envelope from delta/2: never
        let small = DVector::from_element(1, 0.05);
        let triple = simulate_coupled_triple(&sys, &x1, (&x1, &small), &ccfg, &cfg, 0).unwrap();
        assert_eq!(stopping_time_tau_delta(&triple, &ccfg), None);
    }

    #[test]
    fn girsanov_drift_arithmetic_and_rank_errors() {
        let sys = benchmarks::scalar_linear(0.0, 2.0, &[], 0.0, 0.0, &[], 0.0).unwrap();
        let mut ccfg = test_ccfg(0.1);
        ccfg.lambda = 30.0;
        let x1 = DVector::from_element(1, 0.1);
        let zero = DVector::zeros(1);
        let v = girsanov_drift(&sys, &ccfg, &x1, &zero).unwrap();
        assert!((v[0] - 1.5).abs() < 1e-12, "got {}", v[0]);
        assert_eq!(
            girsanov_drift(&sys, &ccfg, &zero, &zero).unwrap()[0],
            0.0
        );

        let degenerate = benchmarks::scalar_linear(0.0, 0.0, &[], 0.0, 0.0, &[], 0.0).unwrap();
        assert!(matches!(
            girsanov_drift(&degenerate, &ccfg, &x1, &zero),
            Err(SimError::RankDeficient(_))
        ));
    }
}
