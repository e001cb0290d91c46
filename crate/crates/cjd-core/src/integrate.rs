//! Weak Euler integration of coupled jump diffusions with
//! compensated-jump-correct stepping.
//!
//! Per step of size `dt` each component advances by
//!
//! ```text
//! x += b(x) dt + sigma(x) * sqrt(dt) * xi
//!      + sum_{arrivals} gamma(x, mark) - dt * sum_{atoms} weight * gamma(x, mark)
//! ```
//!
//! with `xi` standard Gaussian and per-atom arrival counts Poisson of rate
//! `weight`. All coefficients are evaluated at the pre-step state (the
//! left-limit convention), and the compensator subtraction makes every
//! finite-activity jump integral a martingale of the discrete scheme
//! exactly, not just in the `dt -> 0` limit.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;
use nalgebra::DVector;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use crate::error::SimError;
use crate::levy::LevyMeasure;
use crate::rng::{path_rng, StreamTag};
use crate::system::CoupledJumpDiffusion;
use crate::DIVERGENCE_RADIUS;

/// Time grid, seeding, and recording density of an integration run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    /// Step size (time units).
    pub dt: f64,
    /// Requested horizon; the effective horizon is `n_steps * dt` with
    /// `n_steps = round(horizon / dt)`.
    pub horizon: f64,
    /// Master seed; combined with the path index into per-path streams.
    pub master_seed: u64,
    /// Record every `record_stride`-th step (the initial and final states
    /// are always recorded).
    pub record_stride: usize,
}

impl IntegratorConfig {
    pub fn new(dt: f64, horizon: f64, master_seed: u64) -> Self {
        Self {
            dt,
            horizon,
            master_seed,
            record_stride: 1,
        }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.record_stride = stride;
        self
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(SimError::config("dt must be positive and finite"));
        }
        if !(self.horizon.is_finite() && self.horizon >= self.dt) {
            return Err(SimError::config("horizon must satisfy dt <= horizon"));
        }
        if self.record_stride == 0 {
            return Err(SimError::config("record_stride must be >= 1"));
        }
        Ok(())
    }

    /// Number of Euler steps.
    pub fn n_steps(&self) -> usize {
        ((self.horizon / self.dt).round() as usize).max(1)
    }

    /// `n_steps * dt`, the horizon actually integrated.
    pub fn effective_horizon(&self) -> f64 {
        self.n_steps() as f64 * self.dt
    }
}

/// Which jump channel an arrival belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    One,
    Two,
}

/// One recorded jump arrival.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpEvent {
    pub time: f64,
    pub channel: Channel,
    pub atom: usize,
}

/// A recorded sample path of a coupled system.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSample {
    times: Vec<f64>,
    states: Vec<(DVector<f64>, DVector<f64>)>,
    jump_log: Vec<JumpEvent>,
}

impl PathSample {
    pub(crate) fn new(
        times: Vec<f64>,
        states: Vec<(DVector<f64>, DVector<f64>)>,
        jump_log: Vec<JumpEvent>,
    ) -> Self {
        debug_assert_eq!(times.len(), states.len());
        debug_assert!(times.windows(2).all(|w| w[0] < w[1]));
        Self {
            times,
            states,
            jump_log,
        }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[(DVector<f64>, DVector<f64>)] {
        &self.states
    }

    pub fn jump_log(&self) -> &[JumpEvent] {
        &self.jump_log
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &(DVector<f64>, DVector<f64>) {
        self.states.last().expect("path has at least the initial state")
    }

    /// Norms of the second component along the path.
    pub fn x2_norms(&self) -> Vec<f64> {
        self.states.iter().map(|(_, x2)| x2.norm()).collect()
    }
}

/// Per-channel jump sampler: one optional Poisson distribution per atom
/// (atoms of zero weight never fire).
pub(crate) struct JumpSampler {
    per_atom: Vec<Option<Poisson<f64>>>,
}

impl JumpSampler {
    pub(crate) fn new(levy: &LevyMeasure, dt: f64) -> Self {
        let per_atom = levy
            .atoms()
            .iter()
            .map(|&(_, w)| {
                if w > 0.0 {
                    Some(Poisson::new(w * dt).expect("positive finite rate"))
                } else {
                    None
                }
            })
            .collect();
        Self { per_atom }
    }

    /// Draw arrival counts for every atom, in atom order.
    pub(crate) fn draw(&self, rng: &mut ChaCha8Rng, counts: &mut Vec<u64>) {
        counts.clear();
        for p in &self.per_atom {
            counts.push(match p {
                Some(p) => p.sample(rng) as u64,
                None => 0,
            });
        }
    }
}

/// Draw a standard-normal vector scaled by `sqrt_dt`.
pub(crate) fn draw_gaussian(rng: &mut ChaCha8Rng, dim: usize, sqrt_dt: f64, out: &mut DVector<f64>) {
    debug_assert_eq!(out.len(), dim);
    for i in 0..dim {
        let z: f64 = rng.sample(StandardNormal);
        out[i] = z * sqrt_dt;
    }
}

/// Advance one component in place:
/// drift, diffusion (with pre-scaled Gaussian), arrivals, compensator.
/// All coefficient evaluations happen at the pre-step state, which the
/// caller passes explicitly (it may differ from `x`, e.g. for coupled
/// copies sharing noise).
#[allow(clippy::too_many_arguments)]
pub(crate) fn step_component(
    x: &mut DVector<f64>,
    b: &DVector<f64>,
    sigma_dw: &DVector<f64>,
    jump_displacements: &[DVector<f64>],
    counts: &[u64],
    levy: &LevyMeasure,
    dt: f64,
) {
    x.axpy(dt, b, 1.0);
    *x += sigma_dw;
    for (a, ((_, w), j)) in levy.atoms().iter().zip(jump_displacements).enumerate() {
        let k = counts[a];
        if k > 0 {
            x.axpy(k as f64, j, 1.0);
        }
        if *w > 0.0 {
            x.axpy(-w * dt, j, 1.0);
        }
    }
}

pub(crate) fn check_finite(x: &DVector<f64>, time: f64) -> Result<(), SimError> {
    let mut sq = 0.0;
    for &v in x.iter() {
        sq += v * v;
    }
    if !sq.is_finite() || sq > DIVERGENCE_RADIUS * DIVERGENCE_RADIUS {
        return Err(SimError::Diverged { time });
    }
    Ok(())
}

/// Simulate one sample path of the coupled system.
///
/// The RNG stream is a pure function of `(cfg.master_seed, path_index)`:
/// identical inputs give bit-identical paths. Per step the draw order is
/// fixed (component-1 Gaussians, component-2 Gaussians, component-1 atom
/// counts, component-2 atom counts), so programs consuming several paths
/// stay reproducible under any execution order.
pub fn simulate_path(
    system: &CoupledJumpDiffusion,
    z0: (&DVector<f64>, &DVector<f64>),
    cfg: &IntegratorConfig,
    path_index: u64,
) -> Result<PathSample, SimError> {
    cfg.validate()?;
    let d = system.dims();
    if z0.0.len() != d.l1 || z0.1.len() != d.l2 {
        return Err(SimError::config("initial state dimensions do not match system dims"));
    }
    let mut rng = path_rng(cfg.master_seed, path_index, StreamTag::Path);
    simulate_path_with_rng(system, z0, cfg, &mut rng)
}

pub(crate) fn simulate_path_with_rng(
    system: &CoupledJumpDiffusion,
    z0: (&DVector<f64>, &DVector<f64>),
    cfg: &IntegratorConfig,
    rng: &mut ChaCha8Rng,
) -> Result<PathSample, SimError> {
    let d = system.dims();
    let dt = cfg.dt;
    let sqrt_dt = dt.sqrt();
    let n_steps = cfg.n_steps();

    let sampler1 = JumpSampler::new(system.levy1(), dt);
    let sampler2 = JumpSampler::new(system.levy2(), dt);

    let mut x1 = z0.0.clone();
    let mut x2 = z0.1.clone();
    let mut dw1 = DVector::zeros(d.d1);
    let mut dw2 = DVector::zeros(d.d2);
    let mut counts1: Vec<u64> = Vec::with_capacity(system.levy1().atoms().len());
    let mut counts2: Vec<u64> = Vec::with_capacity(system.levy2().atoms().len());
    let mut disp1: Vec<DVector<f64>> = Vec::with_capacity(counts1.capacity());
    let mut disp2: Vec<DVector<f64>> = Vec::with_capacity(counts2.capacity());

    let mut times = Vec::with_capacity(n_steps / cfg.record_stride + 2);
    let mut states = Vec::with_capacity(times.capacity());
    let mut jump_log = Vec::new();
    times.push(0.0);
    states.push((x1.clone(), x2.clone()));

    for step in 0..n_steps {
        let t_next = (step + 1) as f64 * dt;

        draw_gaussian(rng, d.d1, sqrt_dt, &mut dw1);
        draw_gaussian(rng, d.d2, sqrt_dt, &mut dw2);
        sampler1.draw(rng, &mut counts1);
        sampler2.draw(rng, &mut counts2);

        let b1 = system.drift1().eval_vec(&x1, &x2, None);
        let b2 = system.drift2().eval_vec(&x1, &x2, None);
        let s1dw = system.diff1().eval_mat(&x1, &x2, None) * &dw1;
        let s2dw = system.diff2().eval_mat(&x1, &x2, None) * &dw2;
        disp1.clear();
        for (mark, _) in system.levy1().atoms() {
            disp1.push(system.jump1().eval_vec(&x1, &x2, Some(mark)));
        }
        disp2.clear();
        for (mark, _) in system.levy2().atoms() {
            disp2.push(system.jump2().eval_vec(&x1, &x2, Some(mark)));
        }

        let x1_pre = x1.clone();
        step_component(&mut x1, &b1, &s1dw, &disp1, &counts1, system.levy1(), dt);
        // the component-2 coefficients were evaluated before x1 moved
        let _ = x1_pre;
        step_component(&mut x2, &b2, &s2dw, &disp2, &counts2, system.levy2(), dt);

        check_finite(&x1, t_next)?;
        check_finite(&x2, t_next)?;

        for (atom, &k) in counts1.iter().enumerate() {
            for _ in 0..k {
                jump_log.push(JumpEvent {
                    time: t_next,
                    channel: Channel::One,
                    atom,
                });
            }
        }
        for (atom, &k) in counts2.iter().enumerate() {
            for _ in 0..k {
                jump_log.push(JumpEvent {
                    time: t_next,
                    channel: Channel::Two,
                    atom,
                });
            }
        }

        if (step + 1) % cfg.record_stride == 0 || step + 1 == n_steps {
            times.push(t_next);
            states.push((x1.clone(), x2.clone()));
        }
    }

    Ok(PathSample::new(times, states, jump_log))
}

/// Simulate the first component on the boundary `x2 = 0`.
///
/// Only component-1 dynamics advance (and only component-1 noise is drawn);
/// the recorded second component is identically zero.
pub fn simulate_boundary_x1(
    system: &CoupledJumpDiffusion,
    x1_0: &DVector<f64>,
    cfg: &IntegratorConfig,
    path_index: u64,
) -> Result<PathSample, SimError> {
    cfg.validate()?;
    let d = system.dims();
    if x1_0.len() != d.l1 {
        return Err(SimError::config("initial state dimension does not match l1"));
    }
    let dt = cfg.dt;
    let sqrt_dt = dt.sqrt();
    let n_steps = cfg.n_steps();
    let mut rng = path_rng(cfg.master_seed, path_index, StreamTag::Path);

    let sampler1 = JumpSampler::new(system.levy1(), dt);
    let zero2 = DVector::zeros(d.l2);

    let mut x1 = x1_0.clone();
    let mut dw1 = DVector::zeros(d.d1);
    let mut counts1: Vec<u64> = Vec::new();
    let mut disp1: Vec<DVector<f64>> = Vec::new();

    let mut times = Vec::with_capacity(n_steps / cfg.record_stride + 2);
    let mut states = Vec::with_capacity(times.capacity());
    let mut jump_log = Vec::new();
    times.push(0.0);
    states.push((x1.clone(), zero2.clone()));

    for step in 0..n_steps {
        let t_next = (step + 1) as f64 * dt;
        draw_gaussian(&mut rng, d.d1, sqrt_dt, &mut dw1);
        sampler1.draw(&mut rng, &mut counts1);

        let b1 = system.drift1().eval_vec(&x1, &zero2, None);
        let s1dw = system.diff1().eval_mat(&x1, &zero2, None) * &dw1;
        disp1.clear();
        for (mark, _) in system.levy1().atoms() {
            disp1.push(system.jump1().eval_vec(&x1, &zero2, Some(mark)));
        }
        step_component(&mut x1, &b1, &s1dw, &disp1, &counts1, system.levy1(), dt);
        check_finite(&x1, t_next)?;

        for (atom, &k) in counts1.iter().enumerate() {
            for _ in 0..k {
                jump_log.push(JumpEvent {
                    time: t_next,
                    channel: Channel::One,
                    atom,
                });
            }
        }
        if (step + 1) % cfg.record_stride == 0 || step + 1 == n_steps {
            times.push(t_next);
            states.push((x1.clone(), zero2.clone()));
        }
    }
    Ok(PathSample::new(times, states, jump_log))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks;
    use crate::system::{CoefficientField, Dims};
    use crate::LevyMeasure;

    fn zero_system() -> CoupledJumpDiffusion {
        CoupledJumpDiffusion::new(
            Dims {
                l1: 1,
                l2: 1,
                d1: 1,
                d2: 1,
                n1: 1,
                n2: 1,
            },
            CoefficientField::zero_drift(1),
            CoefficientField::zero_drift(1),
            CoefficientField::zero_diffusion(1, 1),
            CoefficientField::zero_diffusion(1, 1),
            CoefficientField::zero_jump(1),
            CoefficientField::zero_jump(1),
            LevyMeasure::none(1),
            LevyMeasure::none(1),
        )
        .unwrap()
    }

    #[test]
    fn zero_dynamics_constant_path() {
        let sys = zero_system();
        let cfg = IntegratorConfig::new(1e-2, 1.0, 1);
        let one = DVector::from_element(1, 1.0);
        let path = simulate_path(&sys, (&one, &one), &cfg, 0).unwrap();
        for (x1, x2) in path.states() {
            assert_eq!(x1[0], 1.0);
            assert_eq!(x2[0], 1.0);
        }
        assert!(path.jump_log().is_empty());
    }

    #[test]
    fn deterministic_ode_limit() {
        // drift2 = -x2, everything else zero: x2(1) ~ exp(-1)
        let sys = benchmarks::scalar_linear(0.0, 0.0, &[], -1.0, 0.0, &[], 0.0).unwrap();
        let cfg = IntegratorConfig::new(1e-3, 1.0, 7).with_stride(100);
        let x1 = DVector::zeros(1);
        let x2 = DVector::from_element(1, 1.0);
        let path = simulate_path(&sys, (&x1, &x2), &cfg, 0).unwrap();
        let end = path.final_state().1[0];
        assert!((end - (-1.0f64).exp()).abs() < 2e-3, "got {end}");
    }

    #[test]
    fn boundary_ode_limit() {
        let sys = benchmarks::scalar_linear(1.0, 0.0, &[], 0.0, 0.0, &[], 0.0).unwrap();
        let cfg = IntegratorConfig::new(1e-3, 1.0, 7).with_stride(1000);
        let x1 = DVector::from_element(1, 2.0);
        let path = simulate_boundary_x1(&sys, &x1, &cfg, 0).unwrap();
        let end = path.final_state().0[0];
        assert!((end - 2.0 * (-1.0f64).exp()).abs() < 2e-3, "got {end}");
        assert!(path.states().iter().all(|(_, x2)| x2[0] == 0.0));
    }

    #[test]
    fn bit_identical_reruns() {
        let sys = benchmarks::scalar_linear(1.0, 0.7, &[(0.4, 2.0)], -0.5, 0.9, &[(0.5, 1.0)], 0.3)
            .unwrap();
        let cfg = IntegratorConfig::new(1e-3, 2.0, 99).with_stride(7);
        let x1 = DVector::from_element(1, 0.5);
        let x2 = DVector::from_element(1, 1.0);
        let a = simulate_path(&sys, (&x1, &x2), &cfg, 3).unwrap();
        let b = simulate_path(&sys, (&x1, &x2), &cfg, 3).unwrap();
        assert_eq!(a, b);
        let c = simulate_path(&sys, (&x1, &x2), &cfg, 4).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn divergence_reports_first_bad_time() {
        // expanding deterministic drift: x' = 3 x^3 blows up quickly
        let sys = CoupledJumpDiffusion::new(
            Dims {
                l1: 1,
                l2: 1,
                d1: 1,
                d2: 1,
                n1: 1,
                n2: 1,
            },
            CoefficientField::drift(1, |x1: &DVector<f64>, _: &DVector<f64>| {
                DVector::from_element(1, 3.0 * x1[0] * x1[0] * x1[0])
            }),
            CoefficientField::zero_drift(1),
            CoefficientField::zero_diffusion(1, 1),
            CoefficientField::zero_diffusion(1, 1),
            CoefficientField::zero_jump(1),
            CoefficientField::zero_jump(1),
            LevyMeasure::none(1),
            LevyMeasure::none(1),
        )
        .unwrap();
        let cfg = IntegratorConfig::new(1e-2, 10.0, 1);
        let x1 = DVector::from_element(1, 10.0);
        let x2 = DVector::zeros(1);
        match simulate_path(&sys, (&x1, &x2), &cfg, 0) {
            Err(SimError::Diverged { time }) => assert!(time > 0.0 && time < 10.0),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn invalid_config_rejected() {
        let sys = zero_system();
        let one = DVector::from_element(1, 1.0);
        let bad = IntegratorConfig::new(0.0, 1.0, 1);
        assert!(simulate_path(&sys, (&one, &one), &bad, 0).is_err());
        let bad = IntegratorConfig::new(2.0, 1.0, 1);
        assert!(simulate_path(&sys, (&one, &one), &bad, 0).is_err());
        let bad = IntegratorConfig::new(1e-2, 1.0, 1).with_stride(0);
        assert!(simulate_path(&sys, (&one, &one), &bad, 0).is_err());
    }
}
