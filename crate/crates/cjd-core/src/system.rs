//! Coupled jump-diffusion system descriptions.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::format;
use alloc::sync::Arc;
use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::BuildError;
use crate::levy::LevyMeasure;
use crate::rng::{path_rng, StreamTag};

/// Dimensions of a coupled system: state dims `l1`, `l2`, Brownian dims
/// `d1`, `d2`, and jump-mark dims `n1`, `n2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dims {
    pub l1: usize,
    pub l2: usize,
    pub d1: usize,
    pub d2: usize,
    pub n1: usize,
    pub n2: usize,
}

type EvalFn =
    dyn Fn(&DVector<f64>, &DVector<f64>, Option<&DVector<f64>>) -> DMatrix<f64> + Send + Sync;

/// A deterministic coefficient map `(x1, x2 [, mark]) -> matrix` with a
/// declared output shape.
///
/// Drifts and jump displacements are column vectors (`cols == 1`),
/// diffusions are `rows x cols` matrices. Jump coefficients additionally
/// receive the jump mark. The evaluator must be a pure function of its
/// inputs; construction spot-checks this by double evaluation.
#[derive(Clone)]
pub struct CoefficientField {
    shape: (usize, usize),
    takes_mark: bool,
    lipschitz_hint: Option<f64>,
    eval: Arc<EvalFn>,
}

impl core::fmt::Debug for CoefficientField {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("CoefficientField")
            .field("shape", &self.shape)
            .field("takes_mark", &self.takes_mark)
            .field("lipschitz_hint", &self.lipschitz_hint)
            .finish()
    }
}

impl CoefficientField {
    /// Drift coefficient: `(x1, x2) -> R^rows`.
    pub fn drift<F>(rows: usize, f: F) -> Self
    where
        F: Fn(&DVector<f64>, &DVector<f64>) -> DVector<f64> + Send + Sync + 'static,
    {
        Self {
            shape: (rows, 1),
            takes_mark: false,
            lipschitz_hint: None,
            eval: Arc::new(move |x1, x2, _| {
                let v = f(x1, x2);
                let n = v.len();
                DMatrix::from_column_slice(n, 1, v.as_slice())
            }),
        }
    }

    /// Diffusion coefficient: `(x1, x2) -> R^{rows x cols}`.
    pub fn diffusion<F>(rows: usize, cols: usize, f: F) -> Self
    where
        F: Fn(&DVector<f64>, &DVector<f64>) -> DMatrix<f64> + Send + Sync + 'static,
    {
        Self {
            shape: (rows, cols),
            takes_mark: false,
            lipschitz_hint: None,
            eval: Arc::new(move |x1, x2, _| f(x1, x2)),
        }
    }

    /// Jump displacement coefficient: `(x1, x2, mark) -> R^rows`.
    pub fn jump<F>(rows: usize, f: F) -> Self
    where
        F: Fn(&DVector<f64>, &DVector<f64>, &DVector<f64>) -> DVector<f64> + Send + Sync + 'static,
    {
        Self {
            shape: (rows, 1),
            takes_mark: true,
            lipschitz_hint: None,
            eval: Arc::new(move |x1, x2, mark| {
                let v = f(x1, x2, mark.expect("jump coefficient needs a mark"));
                let n = v.len();
                DMatrix::from_column_slice(n, 1, v.as_slice())
            }),
        }
    }

    /// Identically-zero drift.
    pub fn zero_drift(rows: usize) -> Self {
        Self::drift(rows, move |_, _| DVector::zeros(rows))
    }

    /// Identically-zero diffusion.
    pub fn zero_diffusion(rows: usize, cols: usize) -> Self {
        Self::diffusion(rows, cols, move |_, _| DMatrix::zeros(rows, cols))
    }

    /// Identically-zero jump displacement.
    pub fn zero_jump(rows: usize) -> Self {
        Self::jump(rows, move |_, _, _| DVector::zeros(rows))
    }

    /// Attach an a-priori Lipschitz bound (used only for reporting).
    pub fn with_lipschitz_hint(mut self, hint: f64) -> Self {
        self.lipschitz_hint = Some(hint);
        self
    }

    pub fn shape(&self) -> (usize, usize) {
        self.shape
    }

    pub fn takes_mark(&self) -> bool {
        self.takes_mark
    }

    pub fn lipschitz_hint(&self) -> Option<f64> {
        self.lipschitz_hint
    }

    /// Evaluate as a matrix.
    pub fn eval_mat(
        &self,
        x1: &DVector<f64>,
        x2: &DVector<f64>,
        mark: Option<&DVector<f64>>,
    ) -> DMatrix<f64> {
        let out = (self.eval)(x1, x2, mark);
        debug_assert_eq!(out.shape(), self.shape, "coefficient output shape");
        out
    }

    /// Evaluate a column-vector field (drift or jump).
    pub fn eval_vec(
        &self,
        x1: &DVector<f64>,
        x2: &DVector<f64>,
        mark: Option<&DVector<f64>>,
    ) -> DVector<f64> {
        let out = (self.eval)(x1, x2, mark);
        debug_assert_eq!(out.shape(), self.shape, "coefficient output shape");
        DVector::from_column_slice(out.as_slice())
    }

    /// Construction-time check at one input: output shape and a double
    /// evaluation to spot-check determinism.
    fn check_at(
        &self,
        what: &str,
        x1: &DVector<f64>,
        x2: &DVector<f64>,
        mark: Option<&DVector<f64>>,
    ) -> Result<(), BuildError> {
        let a = (self.eval)(x1, x2, mark);
        if a.shape() != self.shape {
            return Err(BuildError::Shape {
                what: format!("{what} evaluator output"),
                expected: self.shape,
                got: a.shape(),
            });
        }
        let b = (self.eval)(x1, x2, mark);
        if a != b {
            return Err(BuildError::invariant(format!(
                "{what}: evaluator is not deterministic (two evaluations at the same input differ)"
            )));
        }
        Ok(())
    }
}

/// The full coefficient bundle of a coupled jump diffusion
/// `(b1, b2, sigma1, sigma2, gamma1, gamma2, nu1, nu2)` with dimensions.
///
/// Construction validates shapes against `dims`, spot-checks evaluator
/// determinism, and samples the boundary identity
/// `b2(x1, 0) = 0`, `sigma2(x1, 0) = 0`, `gamma2(x1, 0, mark) = 0`
/// that makes the origin an equilibrium of the second component.
#[derive(Debug, Clone)]
pub struct CoupledJumpDiffusion {
    dims: Dims,
    drift1: CoefficientField,
    drift2: CoefficientField,
    diff1: CoefficientField,
    diff2: CoefficientField,
    jump1: CoefficientField,
    jump2: CoefficientField,
    levy1: LevyMeasure,
    levy2: LevyMeasure,
}

/// Tolerance for the sampled boundary-equilibrium check.
const BOUNDARY_TOL: f64 = 1e-9;

impl CoupledJumpDiffusion {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        dims: Dims,
        drift1: CoefficientField,
        drift2: CoefficientField,
        diff1: CoefficientField,
        diff2: CoefficientField,
        jump1: CoefficientField,
        jump2: CoefficientField,
        levy1: LevyMeasure,
        levy2: LevyMeasure,
    ) -> Result<Self, BuildError> {
        let sys = Self {
            dims,
            drift1,
            drift2,
            diff1,
            diff2,
            jump1,
            jump2,
            levy1,
            levy2,
        };
        sys.validate()?;
        Ok(sys)
    }

    fn validate(&self) -> Result<(), BuildError> {
        let d = self.dims;
        if d.l1 == 0 || d.l2 == 0 {
            return Err(BuildError::invariant("state dimensions must be positive"));
        }
        let want = [
            ("drift1", &self.drift1, (d.l1, 1)),
            ("drift2", &self.drift2, (d.l2, 1)),
            ("diff1", &self.diff1, (d.l1, d.d1)),
            ("diff2", &self.diff2, (d.l2, d.d2)),
            ("jump1", &self.jump1, (d.l1, 1)),
            ("jump2", &self.jump2, (d.l2, 1)),
        ];
        for (name, field, shape) in want {
            if field.shape() != shape {
                return Err(BuildError::Shape {
                    what: format!("{name} declared shape"),
                    expected: shape,
                    got: field.shape(),
                });
            }
        }
        if self.levy1.mark_dim() != d.n1 {
            return Err(BuildError::Shape {
                what: "levy1 mark dimension".into(),
                expected: (d.n1, 1),
                got: (self.levy1.mark_dim(), 1),
            });
        }
        if self.levy2.mark_dim() != d.n2 {
            return Err(BuildError::Shape {
                what: "levy2 mark dimension".into(),
                expected: (d.n2, 1),
                got: (self.levy2.mark_dim(), 1),
            });
        }

        // Sampled checks: shapes/determinism at a few states, then the
        // boundary equilibrium identity for the second component.
        let mut rng = path_rng(0x636f7265, 0, StreamTag::Probe);
        let fallback_mark1 = DVector::from_element(d.n1.max(1), 1.0);
        let fallback_mark2 = DVector::from_element(d.n2.max(1), 1.0);
        for probe in 0..8 {
            let scale = if probe < 4 { 1.0 } else { 10.0 };
            let x1 = DVector::from_fn(d.l1, |_, _| rng.random_range(-scale..scale));
            let x2 = DVector::from_fn(d.l2, |_, _| rng.random_range(-scale..scale));
            let zero2 = DVector::zeros(d.l2);

            self.drift1.check_at("drift1", &x1, &x2, None)?;
            self.drift2.check_at("drift2", &x1, &x2, None)?;
            self.diff1.check_at("diff1", &x1, &x2, None)?;
            self.diff2.check_at("diff2", &x1, &x2, None)?;
            let mark1 = self
                .levy1
                .atoms()
                .first()
                .map(|(m, _)| m.clone())
                .unwrap_or_else(|| fallback_mark1.clone());
            self.jump1.check_at("jump1", &x1, &x2, Some(&mark1))?;

            let b2 = self.drift2.eval_vec(&x1, &zero2, None);
            if b2.norm() > BOUNDARY_TOL {
                return Err(BuildError::invariant(format!(
                    "boundary condition drift2(x1, 0) = 0 violated at sampled x1 (|b2| = {:.3e})",
                    b2.norm()
                )));
            }
            let s2 = self.diff2.eval_mat(&x1, &zero2, None);
            if s2.norm() > BOUNDARY_TOL {
                return Err(BuildError::invariant(format!(
                    "boundary condition sigma2(x1, 0) = 0 violated at sampled x1 (|s2| = {:.3e})",
                    s2.norm()
                )));
            }
            if self.levy2.is_empty() {
                self.jump2.check_at("jump2", &x1, &x2, Some(&fallback_mark2))?;
            }
            for (mark, _) in self.levy2.atoms() {
                self.jump2.check_at("jump2", &x1, &x2, Some(mark))?;
                let g2 = self.jump2.eval_vec(&x1, &zero2, Some(mark));
                if g2.norm() > BOUNDARY_TOL {
                    return Err(BuildError::invariant(format!(
                        "boundary condition gamma2(x1, 0, mark) = 0 violated at sampled x1 \
                         (|g2| = {:.3e})",
                        g2.norm()
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn drift1(&self) -> &CoefficientField {
        &self.drift1
    }

    pub fn drift2(&self) -> &CoefficientField {
        &self.drift2
    }

    pub fn diff1(&self) -> &CoefficientField {
        &self.diff1
    }

    pub fn diff2(&self) -> &CoefficientField {
        &self.diff2
    }

    pub fn jump1(&self) -> &CoefficientField {
        &self.jump1
    }

    pub fn jump2(&self) -> &CoefficientField {
        &self.jump2
    }

    pub fn levy1(&self) -> &LevyMeasure {
        &self.levy1
    }

    pub fn levy2(&self) -> &LevyMeasure {
        &self.levy2
    }

    /// Derive a system with the component-1 drift replaced (used by feedback
    /// control). All other coefficients are shared.
    pub fn with_drift1(&self, drift1: CoefficientField) -> Result<Self, BuildError> {
        Self::new(
            self.dims,
            drift1,
            self.drift2.clone(),
            self.diff1.clone(),
            self.diff2.clone(),
            self.jump1.clone(),
            self.jump2.clone(),
            self.levy1.clone(),
            self.levy2.clone(),
        )
    }

    /// Time-change of the first component: drift scaled by `1/eps`,
    /// diffusion by `1/sqrt(eps)`, jump intensities by `1/eps`. The second
    /// component is untouched. At `eps = 1` the returned system performs
    /// bit-identical arithmetic to `self`.
    pub fn accelerated_component1(&self, eps: f64) -> Result<Self, BuildError> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(BuildError::invariant("time-scale eps must be positive"));
        }
        let scale = 1.0 / eps;
        let sqrt_scale = scale.sqrt();
        let d = self.dims;

        let base_drift = self.drift1.clone();
        let drift1 = CoefficientField::drift(d.l1, move |x1, x2| {
            base_drift.eval_vec(x1, x2, None) * scale
        });
        let base_diff = self.diff1.clone();
        let diff1 = CoefficientField::diffusion(d.l1, d.d1, move |x1, x2| {
            base_diff.eval_mat(x1, x2, None) * sqrt_scale
        });

        Self::new(
            d,
            drift1,
            self.drift2.clone(),
            diff1,
            self.diff2.clone(),
            self.jump1.clone(),
            self.jump2.clone(),
            self.levy1.scaled(scale),
            self.levy2.clone(),
        )
    }

    /// Stacked drift `b(z) = (b1, b2)` used by the generator.
    pub(crate) fn full_drift(&self, x1: &DVector<f64>, x2: &DVector<f64>) -> DVector<f64> {
        let b1 = self.drift1.eval_vec(x1, x2, None);
        let b2 = self.drift2.eval_vec(x1, x2, None);
        let mut out = DVector::zeros(self.dims.l1 + self.dims.l2);
        out.rows_mut(0, self.dims.l1).copy_from(&b1);
        out.rows_mut(self.dims.l1, self.dims.l2).copy_from(&b2);
        out
    }
}
