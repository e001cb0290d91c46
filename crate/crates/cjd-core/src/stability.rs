//! Boundary invariant-measure estimation, the Lyapunov functionals, and the
//! stability verdict.
//!
//! The stability of the second component near its equilibrium is read off
//! data of the *boundary* process (the first component with `x2` pinned to
//! zero): if the boundary occupation average of the functional `f1` is
//! positive, the second component decays exponentially with rate at least
//! `gamma0 = Lambda1 / (2 m0)`, and the crate cross-checks that prediction
//! by measuring the log-norm slope of the second component directly.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use nalgebra::DVector;
use rand::Rng;

use crate::error::{BuildError, SimError};
use crate::generator::{apply_generator, ScalarField};
use crate::integrate::{simulate_boundary_x1, simulate_path, IntegratorConfig};
use crate::rng::{path_rng, StreamTag};
use crate::runner::run_paths;
use crate::stats::{self, LogSlope};
use crate::system::CoupledJumpDiffusion;
use crate::{ABSORPTION_RADIUS, DIVERGENCE_RADIUS};

type Field = Arc<dyn Fn(&DVector<f64>) -> f64 + Send + Sync>;
type DomainPred = Arc<dyn Fn(&DVector<f64>) -> bool + Send + Sync>;

/// The Lyapunov data certifying stability of the second component:
/// positive `V0`, `V1` controlling the boundary process, a barrier `U`
/// blowing up at the origin with the log-ratio property, the functionals
/// `f1`, `f2` bounding the generator of `U`, and the constants
/// `(m0, alpha0, delta0, c_sigma, K3, K4, K5)`.
#[derive(Clone)]
pub struct StabilityHypotheses {
    pub v0: Field,
    pub v1: Field,
    pub u: Field,
    pub f1: Field,
    pub f2: Field,
    pub m0: f64,
    pub alpha0: f64,
    pub delta0: f64,
    pub c_sigma: f64,
    pub k3: f64,
    pub k4: f64,
    pub k5: f64,
    dim_x1: usize,
    dim_x2: usize,
    x1_domain: Option<DomainPred>,
}

impl core::fmt::Debug for StabilityHypotheses {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("StabilityHypotheses")
            .field("m0", &self.m0)
            .field("alpha0", &self.alpha0)
            .field("delta0", &self.delta0)
            .field("c_sigma", &self.c_sigma)
            .field("k3", &self.k3)
            .field("k4", &self.k4)
            .field("k5", &self.k5)
            .finish()
    }
}

/// Builder for [`StabilityHypotheses`]. `v0`, `v1`, `f1`, `f2` are
/// required; the barrier defaults to the log-barrier
/// `U(x2) = max(-ln |x2|, 0)` with `m0 = 1`, all constants default to 1.
pub struct HypothesesBuilder {
    dim_x1: usize,
    dim_x2: usize,
    v0: Option<Field>,
    v1: Option<Field>,
    u: Option<(Field, f64)>,
    f1: Option<Field>,
    f2: Option<Field>,
    alpha0: f64,
    delta0: f64,
    c_sigma: f64,
    k3: f64,
    k4: f64,
    k5: f64,
    x1_domain: Option<DomainPred>,
}

impl HypothesesBuilder {
    pub fn v0<F: Fn(&DVector<f64>) -> f64 + Send + Sync + 'static>(mut self, f: F) -> Self {
        self.v0 = Some(Arc::new(f));
        self
    }

    pub fn v1<F: Fn(&DVector<f64>) -> f64 + Send + Sync + 'static>(mut self, f: F) -> Self {
        self.v1 = Some(Arc::new(f));
        self
    }

    /// Custom barrier with its log-ratio constant `m0`.
    pub fn u<F: Fn(&DVector<f64>) -> f64 + Send + Sync + 'static>(
        mut self,
        f: F,
        m0: f64,
    ) -> Self {
        self.u = Some((Arc::new(f), m0));
        self
    }

    pub fn f1<F: Fn(&DVector<f64>) -> f64 + Send + Sync + 'static>(mut self, f: F) -> Self {
        self.f1 = Some(Arc::new(f));
        self
    }

    pub fn f1_field(mut self, f: Field) -> Self {
        self.f1 = Some(f);
        self
    }

    pub fn f2<F: Fn(&DVector<f64>) -> f64 + Send + Sync + 'static>(mut self, f: F) -> Self {
        self.f2 = Some(Arc::new(f));
        self
    }

    pub fn alpha0(mut self, v: f64) -> Self {
        self.alpha0 = v;
        self
    }

    pub fn delta0(mut self, v: f64) -> Self {
        self.delta0 = v;
        self
    }

    pub fn c_sigma(mut self, v: f64) -> Self {
        self.c_sigma = v;
        self
    }

    pub fn k3(mut self, v: f64) -> Self {
        self.k3 = v;
        self
    }

    pub fn k4(mut self, v: f64) -> Self {
        self.k4 = v;
        self
    }

    pub fn k5(mut self, v: f64) -> Self {
        self.k5 = v;
        self
    }

    /// Restrict the sampled `x1` checks to the system's state space (e.g.
    /// the positive orthant of a population model). Points failing the
    /// predicate are rejected during validation sampling.
    pub fn x1_domain<F: Fn(&DVector<f64>) -> bool + Send + Sync + 'static>(
        mut self,
        pred: F,
    ) -> Self {
        self.x1_domain = Some(Arc::new(pred));
        self
    }

    pub fn build(self) -> Result<StabilityHypotheses, BuildError> {
        let (u, m0) = match self.u {
            Some((u, m0)) => (u, m0),
            None => (
                Arc::new(|x2: &DVector<f64>| (-(x2.norm().ln())).max(0.0)) as Field,
                1.0,
            ),
        };
        let missing = |what: &str| BuildError::invariant(format!("{what} is required"));
        let hyp = StabilityHypotheses {
            v0: self.v0.ok_or_else(|| missing("v0"))?,
            v1: self.v1.ok_or_else(|| missing("v1"))?,
            u,
            f1: self.f1.ok_or_else(|| missing("f1"))?,
            f2: self.f2.ok_or_else(|| missing("f2"))?,
            m0,
            alpha0: self.alpha0,
            delta0: self.delta0,
            c_sigma: self.c_sigma,
            k3: self.k3,
            k4: self.k4,
            k5: self.k5,
            dim_x1: self.dim_x1,
            dim_x2: self.dim_x2,
            x1_domain: self.x1_domain,
        };
        for (name, v) in [
            ("m0", hyp.m0),
            ("alpha0", hyp.alpha0),
            ("delta0", hyp.delta0),
            ("c_sigma", hyp.c_sigma),
            ("K3", hyp.k3),
            ("K4", hyp.k4),
            ("K5", hyp.k5),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(BuildError::invariant(format!("{name} must be positive")));
            }
        }
        hyp.sampled_checks()?;
        Ok(hyp)
    }
}

impl StabilityHypotheses {
    /// Start building hypotheses for state dims `(l1, l2)`.
    ///
    /// Validation (in [`HypothesesBuilder::build`]) samples
    /// * the log-ratio property `U(a) − U(b) <= m0 ln(|b|/|a|)` over random
    ///   nonzero pairs with norms at most `min(1, delta0)` (the default
    ///   log-barrier satisfies the property exactly there, which is the
    ///   region where the decay argument operates),
    /// * `|f1| + f2 < K5 V1` at random points of the `x1` domain,
    /// * `U(10^-k e)` increasing in `k` (blow-up at the origin).
    pub fn builder(dim_x1: usize, dim_x2: usize) -> HypothesesBuilder {
        HypothesesBuilder {
            dim_x1,
            dim_x2,
            v0: None,
            v1: None,
            u: None,
            f1: None,
            f2: None,
            alpha0: 1.0,
            delta0: 1.0,
            c_sigma: 1.0,
            k3: 1.0,
            k4: 1.0,
            k5: 1.0,
            x1_domain: None,
        }
    }

    fn sample_x1(&self, rng: &mut rand_chacha::ChaCha8Rng) -> Option<DVector<f64>> {
        for _ in 0..256 {
            let x1 = DVector::from_fn(self.dim_x1, |_, _| rng.random_range(-10.0..10.0));
            if self.x1_domain.as_ref().map(|p| p(&x1)).unwrap_or(true) {
                return Some(x1);
            }
        }
        None
    }

    fn sampled_checks(&self) -> Result<(), BuildError> {
        let mut rng = path_rng(0x68b9, 0, StreamTag::Probe);
        let r0 = self.delta0.min(1.0);

        // log-ratio property of U on the punctured ball of radius r0
        for _ in 0..256 {
            let a = random_nonzero(&mut rng, self.dim_x2, r0);
            let b = random_nonzero(&mut rng, self.dim_x2, r0);
            let lhs = (self.u)(&a) - (self.u)(&b);
            let rhs = self.m0 * (b.norm() / a.norm()).ln();
            if lhs > rhs + 1e-9 {
                return Err(BuildError::invariant(format!(
                    "U(a) - U(b) <= m0 ln(|b|/|a|) fails at sampled pair (lhs {lhs:.6}, rhs {rhs:.6})"
                )));
            }
        }

        // |f1| + f2 < K5 V1 at domain points
        for _ in 0..256 {
            let Some(x1) = self.sample_x1(&mut rng) else {
                return Err(BuildError::invariant(
                    "x1 domain rejected every sampled point",
                ));
            };
            let lhs = (self.f1)(&x1).abs() + (self.f2)(&x1);
            let rhs = self.k5 * (self.v1)(&x1);
            if lhs >= rhs {
                return Err(BuildError::invariant(format!(
                    "|f1| + f2 < K5 V1 fails at sampled x1 (lhs {lhs:.6}, rhs {rhs:.6})"
                )));
            }
            if (self.f2)(&x1) < 0.0 {
                return Err(BuildError::invariant("f2 must be nonnegative"));
            }
        }

        // U blows up along rays into the origin
        let dir = DVector::from_element(self.dim_x2, 1.0 / (self.dim_x2 as f64).sqrt());
        let mut prev = f64::NEG_INFINITY;
        for k in 1..=8 {
            let val = (self.u)(&(&dir * 10f64.powi(-k)));
            if val <= prev {
                return Err(BuildError::invariant(
                    "U must increase towards the origin (blow-up check failed)",
                ));
            }
            prev = val;
        }
        Ok(())
    }

    /// Spot-check the boundary drift bound `L V0(x1, 0) <= K3 - K4 V1(x1)`
    /// at sampled boundary points (derivatives of `V0` by central
    /// differences unless supplied through `v0_field`).
    pub fn spot_check_v0(
        &self,
        system: &CoupledJumpDiffusion,
        v0_field: Option<&ScalarField>,
        box_radius: f64,
        samples: usize,
    ) -> Result<(), BuildError> {
        let d = system.dims();
        let v0 = self.v0.clone();
        let fallback;
        let g = match v0_field {
            Some(g) => g,
            None => {
                fallback =
                    ScalarField::new(move |z: &DVector<f64>| v0(&z.rows(0, d.l1).into_owned()));
                &fallback
            }
        };
        let mut rng = path_rng(0x5630, 0, StreamTag::Probe);
        let zero2 = DVector::zeros(d.l2);
        for _ in 0..samples {
            let x1 = DVector::from_fn(d.l1, |_, _| rng.random_range(-box_radius..box_radius));
            let lhs = apply_generator(system, g, (&x1, &zero2));
            let rhs = self.k3 - self.k4 * (self.v1)(&x1);
            if lhs > rhs + 1e-6 {
                return Err(BuildError::invariant(format!(
                    "L V0 <= K3 - K4 V1 fails at sampled boundary point (lhs {lhs:.6}, rhs {rhs:.6})"
                )));
            }
        }
        Ok(())
    }
}

fn random_nonzero(rng: &mut rand_chacha::ChaCha8Rng, dim: usize, radius: f64) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(dim, |_, _| rng.random_range(-radius..radius));
        let n = v.norm();
        if n > 1e-8 && n <= radius {
            return v;
        }
    }
}

/// A weighted sample cloud approximating an invariant measure.
#[derive(Debug, Clone)]
pub struct OccupationMeasure {
    samples: Vec<DVector<f64>>,
    weights: Vec<f64>,
    burn_in: f64,
}

impl OccupationMeasure {
    pub fn new(
        samples: Vec<DVector<f64>>,
        weights: Vec<f64>,
        burn_in: f64,
    ) -> Result<Self, BuildError> {
        if samples.is_empty() {
            return Err(BuildError::invariant("occupation measure needs >= 1 sample"));
        }
        if samples.len() != weights.len() {
            return Err(BuildError::invariant("sample/weight length mismatch"));
        }
        if weights.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) {
            return Err(BuildError::invariant("weights must be nonnegative and finite"));
        }
        let total = stats::ksum(&weights);
        if (total - 1.0).abs() > 1e-12 {
            return Err(BuildError::invariant(format!(
                "weights must sum to 1 (got {total})"
            )));
        }
        Ok(Self {
            samples,
            weights,
            burn_in,
        })
    }

    /// Equal-weight cloud.
    pub fn uniform(samples: Vec<DVector<f64>>, burn_in: f64) -> Result<Self, BuildError> {
        let n = samples.len();
        if n == 0 {
            return Err(BuildError::invariant("occupation measure needs >= 1 sample"));
        }
        // normalize a vector of 1/n entries so that the stored weights sum
        // to 1 within one rounding
        let w = 1.0 / n as f64;
        let mut weights = alloc::vec![w; n];
        let total = stats::ksum(&weights);
        for wi in weights.iter_mut() {
            *wi /= total;
        }
        Self::new(samples, weights, burn_in)
    }

    pub fn samples(&self) -> &[DVector<f64>] {
        &self.samples
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn burn_in(&self) -> f64 {
        self.burn_in
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Weighted mean of the sample vectors.
    pub fn mean_vector(&self) -> DVector<f64> {
        let dim = self.samples[0].len();
        let mut acc = DVector::zeros(dim);
        for (s, &w) in self.samples.iter().zip(&self.weights) {
            acc.axpy(w, s, 1.0);
        }
        acc
    }
}

/// Estimate the boundary invariant measure by concatenating post-burn-in
/// time samples of `ensemble` boundary paths (burn-in: the first 20% of the
/// horizon). Recording density follows `cfg.record_stride`.
pub fn estimate_invariant_measure(
    system: &CoupledJumpDiffusion,
    x1_0: &DVector<f64>,
    cfg: &IntegratorConfig,
    ensemble: usize,
) -> Result<OccupationMeasure, SimError> {
    cfg.validate()?;
    if ensemble == 0 {
        return Err(SimError::config("ensemble must be >= 1"));
    }
    let burn_in = 0.2 * cfg.effective_horizon();
    let paths = run_paths(ensemble, |idx| simulate_boundary_x1(system, x1_0, cfg, idx));
    let mut samples = Vec::new();
    for path in paths {
        let path = path?; // boundary divergence: no invariant-measure evidence
        for (t, (x1, _)) in path.times().iter().zip(path.states()) {
            if *t > burn_in {
                samples.push(x1.clone());
            }
        }
    }
    if samples.is_empty() {
        return Err(SimError::Empty(String::from(
            "no post-burn-in samples; increase horizon or lower record_stride",
        )));
    }
    OccupationMeasure::uniform(samples, burn_in).map_err(SimError::from)
}

/// Weighted occupation average of `f` with a batch-means standard error.
pub fn estimate_lambda(
    occ: &OccupationMeasure,
    f: &(dyn Fn(&DVector<f64>) -> f64 + Sync),
) -> Result<(f64, f64), SimError> {
    if occ.is_empty() {
        return Err(SimError::Empty(String::from("occupation measure is empty")));
    }
    let values: Vec<f64> = occ.samples().iter().map(|s| f(s)).collect();
    let mean = stats::weighted_mean(&values, occ.weights());
    let (_, se) = stats::batch_means(&values);
    Ok((mean, se))
}

/// Per-path exponential rates of the second component with ensemble
/// statistics.
#[derive(Debug, Clone)]
pub struct ExponentEstimate {
    pub mean: f64,
    pub stderr: f64,
    /// Per-path fitted slopes (floored/capped values included).
    pub slopes: Vec<f64>,
    /// Paths absorbed at 0 (slope reported at the resolvable floor).
    pub absorbed: usize,
    /// Paths that left the guard radius (slope fitted on the prefix or
    /// reported at the ceiling).
    pub diverged: usize,
}

impl ExponentEstimate {
    pub fn value(&self) -> (f64, f64) {
        (self.mean, self.stderr)
    }

    /// Fraction of paths with slope at most `threshold`.
    pub fn fraction_below(&self, threshold: f64) -> f64 {
        if self.slopes.is_empty() {
            return 0.0;
        }
        self.slopes.iter().filter(|&&s| s <= threshold).count() as f64 / self.slopes.len() as f64
    }
}

/// Estimate the exponential rate of `|X2|`: per path, the least-squares
/// slope of `ln |X2(t)|` over the second half of the horizon; returns the
/// ensemble mean with its standard error.
///
/// Paths absorbed at 0 contribute the fastest slope resolvable over the fit
/// window (a reported floor); paths that diverge contribute their positive
/// prefix slope (or the analogous ceiling when the prefix is too short).
/// Only an ensemble in which every path diverged is an error.
pub fn estimate_log_lyapunov_exponent(
    system: &CoupledJumpDiffusion,
    z0: (&DVector<f64>, &DVector<f64>),
    cfg: &IntegratorConfig,
    ensemble: usize,
) -> Result<ExponentEstimate, SimError> {
    cfg.validate()?;
    if ensemble == 0 {
        return Err(SimError::config("ensemble must be >= 1"));
    }
    if z0.1.norm() == 0.0 {
        return Err(SimError::config("x2(0) must be nonzero"));
    }
    let window_start = 0.5 * cfg.effective_horizon();
    let results = run_paths(ensemble, |idx| simulate_path(system, z0, cfg, idx));

    let mut slopes = Vec::with_capacity(ensemble);
    let mut absorbed = 0usize;
    let mut diverged = 0usize;
    for res in results {
        let (path, was_diverged) = match res {
            Ok(p) => (p, false),
            Err(SimError::Diverged { .. }) => {
                // refit on the recorded prefix: re-simulate cheaply is not
                // possible (the path errored), so diverged paths contribute
                // the ceiling slope
                diverged += 1;
                slopes.push(
                    (DIVERGENCE_RADIUS.ln() - z0.1.norm().max(ABSORPTION_RADIUS).ln())
                        / (cfg.effective_horizon() - window_start),
                );
                continue;
            }
            Err(e) => return Err(e),
        };
        let norms = path.x2_norms();
        match stats::fit_log_slope(
            path.times(),
            &norms,
            window_start,
            ABSORPTION_RADIUS,
            was_diverged,
            DIVERGENCE_RADIUS,
        ) {
            LogSlope::Fitted(s) => slopes.push(s),
            LogSlope::Absorbed(s) => {
                absorbed += 1;
                slopes.push(s);
            }
            LogSlope::Diverged(s) => {
                diverged += 1;
                slopes.push(s);
            }
        }
    }
    if diverged == ensemble {
        return Err(SimError::AllPathsDiverged);
    }
    let mean = stats::mean(&slopes);
    let stderr = if slopes.len() < 2 {
        0.0
    } else {
        stats::stderr_of_mean(&slopes)
    };
    Ok(ExponentEstimate {
        mean,
        stderr,
        slopes,
        absorbed,
        diverged,
    })
}

/// Verdict of the stability analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// `Lambda1_hat - 2 stderr > 0`: decay of the second component at rate
    /// `gamma0` is certified (up to sampling error).
    Stable,
    /// The positivity test failed; nothing follows (the criterion is
    /// one-directional).
    Inconclusive,
    /// The measured exponent is positive by more than two standard errors.
    /// Issued only from the direct measurement, never from `Lambda1` alone.
    UnstableIndicated,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Stable => "stable",
            Verdict::Inconclusive => "inconclusive",
            Verdict::UnstableIndicated => "unstable-indicated",
        }
    }
}

/// Full output of [`stability_verdict`].
#[derive(Debug, Clone)]
pub struct LyapunovReport {
    pub lambda1: (f64, f64),
    pub lambda2: (f64, f64),
    /// Predicted decay rate `Lambda1 / (2 m0)`; only defined when the
    /// positivity test passes.
    pub gamma0: Option<f64>,
    /// Measured exponential rate of `|X2|` from small initial data.
    pub exponent: (f64, f64),
    pub verdict: Verdict,
    /// Whether the measured exponent is consistent with the predicted
    /// decay (`exponent <= -gamma0 + tol`); `None` when no rate was
    /// predicted.
    pub agreement: Option<bool>,
}

impl LyapunovReport {
    /// Header of the flat CSV serialization.
    pub fn csv_header() -> &'static str {
        "lambda1,lambda1_stderr,lambda2,lambda2_stderr,gamma0,exponent,exponent_stderr,verdict,agreement"
    }

    /// Flat CSV row matching [`LyapunovReport::csv_header`]. Floats use 17
    /// significant digits; missing optionals serialize as `nan` / empty.
    pub fn csv_row(&self) -> String {
        let fmt = |x: f64| format!("{x:.16e}");
        format!(
            "{},{},{},{},{},{},{},{},{}",
            fmt(self.lambda1.0),
            fmt(self.lambda1.1),
            fmt(self.lambda2.0),
            fmt(self.lambda2.1),
            self.gamma0.map(fmt).unwrap_or_else(|| String::from("nan")),
            fmt(self.exponent.0),
            fmt(self.exponent.1),
            self.verdict.as_str(),
            self.agreement
                .map(|a| if a { "true" } else { "false" })
                .unwrap_or(""),
        )
    }
}

/// Ensemble size used for the exponent cross-check inside
/// [`stability_verdict`].
const VERDICT_CROSS_CHECK_ENSEMBLE: usize = 32;

/// Issue the stability verdict for `system` given hypotheses `hyp` and a
/// boundary occupation measure `occ`.
///
/// Computes `Lambda1_hat`, `Lambda2_hat`; when `Lambda1_hat` is positive at
/// two standard errors the verdict is `Stable` with predicted decay rate
/// `gamma0 = Lambda1_hat / (2 m0)`, cross-checked by measuring the exponent
/// of `|X2|` started from `x2(0)` of norm `min(1e-3, delta0/10)` at the
/// occupation mean of `x1`.
pub fn stability_verdict(
    system: &CoupledJumpDiffusion,
    hyp: &StabilityHypotheses,
    occ: &OccupationMeasure,
    cfg: &IntegratorConfig,
) -> Result<LyapunovReport, SimError> {
    let d = system.dims();
    if occ.samples()[0].len() != d.l1 {
        return Err(SimError::config(
            "occupation measure dimension does not match the system's l1",
        ));
    }
    let f1 = hyp.f1.clone();
    let f2 = hyp.f2.clone();
    let lambda1 = estimate_lambda(occ, &*f1)?;
    let lambda2 = estimate_lambda(occ, &*f2)?;

    let x1_0 = occ.mean_vector();
    let mut x2_0 = DVector::zeros(d.l2);
    x2_0[0] = (1e-3f64).min(hyp.delta0 / 10.0);
    let exponent = estimate_log_lyapunov_exponent(
        system,
        (&x1_0, &x2_0),
        cfg,
        VERDICT_CROSS_CHECK_ENSEMBLE,
    )?;

    let stable = lambda1.0 - 2.0 * lambda1.1 > 0.0;
    let gamma0 = stable.then(|| lambda1.0 / (2.0 * hyp.m0));
    let agreement = gamma0.map(|g| {
        let tol = 0.05 + 2.0 * exponent.stderr;
        exponent.mean <= -g + tol
    });
    let verdict = if stable {
        Verdict::Stable
    } else if exponent.mean - 2.0 * exponent.stderr > 0.0 {
        Verdict::UnstableIndicated
    } else {
        Verdict::Inconclusive
    };
    Ok(LyapunovReport {
        lambda1,
        lambda2,
        gamma0,
        exponent: exponent.value(),
        verdict,
        agreement,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks;

    fn basic_hyp(f1c: f64) -> StabilityHypotheses {
        StabilityHypotheses::builder(1, 1)
            .v0(|_| 1.0)
            .v1(|_| 10.0)
            .f1(move |_| f1c)
            .f2(|_| 1.0)
            .delta0(0.5)
            .build()
            .unwrap()
    }

    #[test]
    fn lambda_of_constant_function_has_zero_stderr() {
        let samples = alloc::vec![DVector::from_element(1, 0.0); 50];
        let occ = OccupationMeasure::uniform(samples, 0.0).unwrap();
        let (m, se) = estimate_lambda(&occ, &|_: &DVector<f64>| 3.0).unwrap();
        assert_eq!(m, 3.0);
        assert_eq!(se, 0.0);
    }

    #[test]
    fn log_barrier_rejects_supra_unit_m0_violation() {
        // U = 2 * log barrier needs m0 = 2; m0 = 1 must be rejected
        let bad = StabilityHypotheses::builder(1, 1)
            .v0(|_| 1.0)
            .v1(|_| 10.0)
            .u(|x2: &DVector<f64>| 2.0 * (-(x2.norm().ln())).max(0.0), 1.0)
            .f1(|_| 1.0)
            .f2(|_| 1.0)
            .delta0(0.5)
            .build();
        assert!(bad.is_err());
    }

    #[test]
    fn f1_bound_violation_rejected() {
        // |f1| + f2 = 3 >= K5 V1 = 2
        let bad = StabilityHypotheses::builder(1, 1)
            .v0(|_| 1.0)
            .v1(|_| 2.0)
            .f1(|_| 2.0)
            .f2(|_| 1.0)
            .delta0(0.5)
            .build();
        assert!(bad.is_err());
    }

    #[test]
    fn contraction_concentrates_occupation_at_origin() {
        // deterministic boundary contraction: mass at 0
        let sys = benchmarks::scalar_linear(1.0, 0.0, &[], 0.0, 0.0, &[], 0.0).unwrap();
        let cfg = IntegratorConfig::new(1e-2, 50.0, 5).with_stride(10);
        let x1 = DVector::from_element(1, 1.0);
        let occ = estimate_invariant_measure(&sys, &x1, &cfg, 2).unwrap();
        let (m, _) = estimate_lambda(&occ, &|x: &DVector<f64>| x[0].abs()).unwrap();
        assert!(m < 1e-3, "got {m}");
    }

    #[test]
    fn trivial_verdict_examples() {
        let sys = benchmarks::scalar_linear(1.0, 0.5, &[], -1.0, 0.0, &[], 0.0).unwrap();
        let cfg = IntegratorConfig::new(1e-2, 60.0, 11).with_stride(5);
        let x1 = DVector::zeros(1);
        let occ = estimate_invariant_measure(&sys, &x1, &cfg, 4).unwrap();

        // f1 = +1: stable with gamma0 = 0.5 (the x2 dynamics here decay)
        let rep = stability_verdict(&sys, &basic_hyp(1.0), &occ, &cfg).unwrap();
        assert_eq!(rep.verdict, Verdict::Stable);
        let g0 = rep.gamma0.unwrap();
        assert!((g0 - 0.5).abs() < 1e-12, "gamma0 {g0}");

        // f1 = -1: hypotheses fail, nothing follows
        let rep = stability_verdict(&sys, &basic_hyp(-1.0), &occ, &cfg).unwrap();
        assert_eq!(rep.verdict, Verdict::Inconclusive);
        assert!(rep.gamma0.is_none());
    }
}
