//! Weak stabilization of the interacting component by linear state
//! feedback.
//!
//! Only the first component accepts a control; the feedback `u = A x1`
//! shapes its boundary invariant measure so that the occupation average of
//! the destabilizing functional `f1(x1) <= -K1 + K2 |x1|^2` turns negative,
//! which transfers stability to the second component.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::format;
use alloc::string::String;
use nalgebra::{DMatrix, DVector};

use crate::error::{BuildError, SimError};
use crate::integrate::IntegratorConfig;
use crate::stability::{
    estimate_invariant_measure, estimate_lambda, estimate_log_lyapunov_exponent,
    StabilityHypotheses,
};
use crate::system::{CoefficientField, CoupledJumpDiffusion};

/// A feedback design `u = A x1` built around a quadratic form `x1' Q x1`.
///
/// `lambda_A = -max_{|x1|=1} x1' Q A x1`, which depends only on the
/// symmetric part of `QA`; the design inequality demands
/// `lambda_A > (K2 c1 + K1 c2) / K1` where `c1 + c2 |x1|^2` bounds the
/// uncontrolled generator of the quadratic form and
/// `f1(x1) <= -K1 + K2 |x1|^2`.
#[derive(Debug, Clone)]
pub struct FeedbackGainDesign {
    pub q: DMatrix<f64>,
    pub a: DMatrix<f64>,
    pub lambda_a: f64,
    pub c1: f64,
    pub c2: f64,
    pub k1: f64,
    pub k2: f64,
    /// `lambda_A - threshold`; positive iff the design inequality holds.
    pub margin: f64,
    /// Whether `lambda_A > (K2 c1 + K1 c2) / K1`.
    pub design_ok: bool,
}

impl FeedbackGainDesign {
    pub fn csv_header() -> &'static str {
        "lambda_a,margin,design_ok,estimate,estimate_stderr,analytic_bound,outcome"
    }
}

fn check_symmetric(q: &DMatrix<f64>) -> Result<(), BuildError> {
    if q.nrows() != q.ncols() {
        return Err(BuildError::invariant("Q must be square"));
    }
    if (q - q.transpose()).norm() > 1e-10 * (1.0 + q.norm()) {
        return Err(BuildError::invariant("Q must be symmetric"));
    }
    Ok(())
}

/// `lambda_A = -lambda_max( (QA + (QA)') / 2 )`: the quadratic form
/// `x1' Q A x1` depends only on the symmetric part of `QA`, so the maximum
/// over the unit sphere is its largest eigenvalue.
pub fn compute_lambda_a(q: &DMatrix<f64>, a: &DMatrix<f64>) -> Result<f64, BuildError> {
    check_symmetric(q)?;
    if a.shape() != q.shape() {
        return Err(BuildError::invariant("A must have the shape of Q"));
    }
    let qa = q * a;
    let sym = (&qa + qa.transpose()) * 0.5;
    let eigs = sym.symmetric_eigenvalues();
    Ok(-eigs.max())
}

/// Synthesize `A = -kappa Q^{-1}` with `kappa = max(1.5 * threshold, 1e-6)`,
/// which achieves `lambda_A = kappa` exactly (up to eigensolver rounding).
pub fn synthesize_gain(q: &DMatrix<f64>, threshold: f64) -> Result<DMatrix<f64>, BuildError> {
    check_symmetric(q)?;
    let eigs = q.symmetric_eigenvalues();
    if eigs.min() <= 0.0 {
        return Err(BuildError::invariant(
            "Q must be positive definite for gain synthesis",
        ));
    }
    if !threshold.is_finite() {
        return Err(BuildError::invariant("threshold must be finite"));
    }
    let kappa = (1.5 * threshold).max(1e-6);
    let q_inv = q
        .clone()
        .try_inverse()
        .ok_or_else(|| BuildError::invariant("Q is numerically singular"))?;
    Ok(q_inv * -kappa)
}

/// Full design: synthesize the gain for the constants
/// `(c1, c2, K1, K2)` and record the achieved margin.
pub fn design_feedback(
    q: &DMatrix<f64>,
    c1: f64,
    c2: f64,
    k1: f64,
    k2: f64,
) -> Result<FeedbackGainDesign, BuildError> {
    if !(k1 > 0.0) {
        return Err(BuildError::invariant("K1 must be positive"));
    }
    if c1 < 0.0 || c2 < 0.0 || k2 < 0.0 {
        return Err(BuildError::invariant("c1, c2, K2 must be nonnegative"));
    }
    let threshold = (k2 * c1 + k1 * c2) / k1;
    let a = synthesize_gain(q, threshold)?;
    let lambda_a = compute_lambda_a(q, &a)?;
    Ok(FeedbackGainDesign {
        q: q.clone(),
        a,
        lambda_a,
        c1,
        c2,
        k1,
        k2,
        margin: lambda_a - threshold,
        design_ok: lambda_a > threshold,
    })
}

/// Apply the feedback to the system: component-1 drift becomes
/// `b1(x1, x2) + A x1`.
pub fn controlled_system(
    system: &CoupledJumpDiffusion,
    a: &DMatrix<f64>,
) -> Result<CoupledJumpDiffusion, BuildError> {
    let d = system.dims();
    if a.shape() != (d.l1, d.l1) {
        return Err(BuildError::invariant("gain shape must be l1 x l1"));
    }
    let base = system.drift1().clone();
    let a = a.clone();
    system.with_drift1(CoefficientField::drift(d.l1, move |x1, x2| {
        base.eval_vec(x1, x2, None) + &a * x1
    }))
}

/// Outcome of the empirical verification of a design.
#[derive(Debug, Clone)]
pub enum StabilizationOutcome {
    /// The controlled boundary system is ergodic at desk scale; carries the
    /// occupation estimate of `int f1 dPi`.
    Verified,
    /// The controlled boundary system diverged: the design is empirically
    /// insufficient.
    Diverged { time: f64 },
}

#[derive(Debug, Clone)]
pub struct StabilizationReport {
    pub design: FeedbackGainDesign,
    pub outcome: StabilizationOutcome,
    /// Occupation estimate of `int f1 dPi_1` with stderr (when verified).
    pub estimate: Option<(f64, f64)>,
    /// The design bound `-K1 + K2 c1 / (lambda_A - c2)` (infinite when
    /// `lambda_A <= c2`).
    pub analytic_bound: f64,
}

impl StabilizationReport {
    pub fn csv_row(&self) -> String {
        let fmt = |x: f64| format!("{x:.16e}");
        format!(
            "{},{},{},{},{},{},{}",
            fmt(self.design.lambda_a),
            fmt(self.design.margin),
            self.design.design_ok,
            self.estimate.map(|(v, _)| fmt(v)).unwrap_or_else(|| "nan".into()),
            self.estimate.map(|(_, s)| fmt(s)).unwrap_or_else(|| "nan".into()),
            fmt(self.analytic_bound),
            match self.outcome {
                StabilizationOutcome::Verified => "verified",
                StabilizationOutcome::Diverged { .. } => "diverged",
            }
        )
    }
}

/// Verify a design empirically: simulate the controlled boundary system,
/// estimate its occupation measure and `int f1 dPi_1`, and report the sign
/// with its confidence interval next to the analytic bound.
pub fn verify_weak_stabilization(
    system: &CoupledJumpDiffusion,
    design: &FeedbackGainDesign,
    hyp: &StabilityHypotheses,
    cfg: &IntegratorConfig,
    ensemble: usize,
) -> Result<StabilizationReport, SimError> {
    let controlled = controlled_system(system, &design.a)?;
    let analytic_bound = if design.lambda_a > design.c2 {
        -design.k1 + design.k2 * design.c1 / (design.lambda_a - design.c2)
    } else {
        f64::INFINITY
    };
    let x1_0 = DVector::zeros(system.dims().l1);
    let occ = match estimate_invariant_measure(&controlled, &x1_0, cfg, ensemble) {
        Ok(occ) => occ,
        Err(SimError::Diverged { time }) => {
            return Ok(StabilizationReport {
                design: design.clone(),
                outcome: StabilizationOutcome::Diverged { time },
                estimate: None,
                analytic_bound,
            })
        }
        Err(e) => return Err(e),
    };
    let f1 = hyp.f1.clone();
    let estimate = estimate_lambda(&occ, &*f1)?;
    Ok(StabilizationReport {
        design: design.clone(),
        outcome: StabilizationOutcome::Verified,
        estimate: Some(estimate),
        analytic_bound,
    })
}

/// Fraction of controlled full-system paths whose second component decays:
/// per-path fitted exponents of `|X2|` from a small initial displacement.
pub fn controlled_decay_fraction(
    system: &CoupledJumpDiffusion,
    design: &FeedbackGainDesign,
    x2_scale: f64,
    cfg: &IntegratorConfig,
    ensemble: usize,
    margin: f64,
) -> Result<f64, SimError> {
    let controlled = controlled_system(system, &design.a)?;
    let d = system.dims();
    let x1_0 = DVector::zeros(d.l1);
    let mut x2_0 = DVector::zeros(d.l2);
    x2_0[0] = x2_scale;
    let est = estimate_log_lyapunov_exponent(&controlled, (&x1_0, &x2_0), cfg, ensemble)?;
    Ok(est.fraction_below(-margin))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_a_closed_forms() {
        // Q = I, A = -2I: lambda_A = 2
        let q = DMatrix::identity(2, 2);
        let a = DMatrix::identity(2, 2) * -2.0;
        assert!((compute_lambda_a(&q, &a).unwrap() - 2.0).abs() < 1e-12);

        // Q = diag(1,2), A = -I: max of x'(-Q)x / |x|^2 = -1
        let q = DMatrix::from_diagonal(&DVector::from_column_slice(&[1.0, 2.0]));
        let a = DMatrix::identity(2, 2) * -1.0;
        assert!((compute_lambda_a(&q, &a).unwrap() - 1.0).abs() < 1e-12);

        // skew A with Q = I: the quadratic form vanishes
        let q = DMatrix::identity(2, 2);
        let a = DMatrix::from_row_slice(2, 2, &[0.0, -3.0, 3.0, 0.0]);
        assert!(compute_lambda_a(&q, &a).unwrap().abs() < 1e-12);
    }

    #[test]
    fn synthesis_examples() {
        // Q = I, threshold 2: A = -3I
        let q = DMatrix::identity(2, 2);
        let a = synthesize_gain(&q, 2.0).unwrap();
        assert!((&a + DMatrix::identity(2, 2) * 3.0).norm() < 1e-12);
        assert!((compute_lambda_a(&q, &a).unwrap() - 3.0).abs() < 1e-10);

        // Q = diag(1,4), threshold 1: A = -1.5 diag(1, 0.25), lambda_A = 1.5
        let q = DMatrix::from_diagonal(&DVector::from_column_slice(&[1.0, 4.0]));
        let a = synthesize_gain(&q, 1.0).unwrap();
        let want = DMatrix::from_diagonal(&DVector::from_column_slice(&[-1.5, -0.375]));
        assert!((&a - want).norm() < 1e-12, "{a}");
        assert!((compute_lambda_a(&q, &a).unwrap() - 1.5).abs() < 1e-10);

        // threshold 0: kappa floored at 1e-6, not zero
        let a = synthesize_gain(&DMatrix::identity(1, 1), 0.0).unwrap();
        assert!((a[(0, 0)] + 1e-6).abs() < 1e-18);

        // singular Q rejected
        let q = DMatrix::zeros(2, 2);
        assert!(synthesize_gain(&q, 1.0).is_err());
    }

    #[test]
    fn asymmetric_q_rejected() {
        let q = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(compute_lambda_a(&q, &DMatrix::identity(2, 2)).is_err());
    }
}
