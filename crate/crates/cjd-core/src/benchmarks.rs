//! Ready-made benchmark systems shared by the estimators' tests and the
//! scenario runner.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};

use crate::error::BuildError;
use crate::levy::LevyMeasure;
use crate::polar::LinearizedCoefficients;
use crate::system::{CoefficientField, CoupledJumpDiffusion, Dims};

/// Scalar coupled linear benchmark:
///
/// ```text
/// dX1 = -theta1 X1 dt + sigma1 dW1 + sum_atoms mark dN~1        (additive jumps)
/// dX2 = (a + c X1) X2 dt + s X2 dW2 + X2 sum_atoms mark dN~2    (multiplicative)
/// ```
///
/// With `c = 0` the second component is the workhorse scalar linear jump
/// diffusion whose exponential rate has a closed form; the first component
/// is an Ornstein-Uhlenbeck boundary process.
pub fn scalar_linear(
    theta1: f64,
    sigma1: f64,
    jumps1: &[(f64, f64)],
    a: f64,
    s: f64,
    jumps2: &[(f64, f64)],
    coupling: f64,
) -> Result<CoupledJumpDiffusion, BuildError> {
    scalar_bidirectional(theta1, sigma1, jumps1, a, s, jumps2, coupling, 0.0)
}

/// [`scalar_linear`] with an additional back-action `back * X2` on the
/// drift of the first component, making the pair fully coupled.
#[allow(clippy::too_many_arguments)]
pub fn scalar_bidirectional(
    theta1: f64,
    sigma1: f64,
    jumps1: &[(f64, f64)],
    a: f64,
    s: f64,
    jumps2: &[(f64, f64)],
    coupling: f64,
    back: f64,
) -> Result<CoupledJumpDiffusion, BuildError> {
    let dims = Dims {
        l1: 1,
        l2: 1,
        d1: 1,
        d2: 1,
        n1: 1,
        n2: 1,
    };
    CoupledJumpDiffusion::new(
        dims,
        CoefficientField::drift(1, move |x1: &DVector<f64>, x2: &DVector<f64>| {
            DVector::from_element(1, -theta1 * x1[0] + back * x2[0])
        }),
        CoefficientField::drift(1, move |x1: &DVector<f64>, x2: &DVector<f64>| {
            DVector::from_element(1, (a + coupling * x1[0]) * x2[0])
        }),
        CoefficientField::diffusion(1, 1, move |_, _| DMatrix::from_element(1, 1, sigma1)),
        CoefficientField::diffusion(1, 1, move |_, x2: &DVector<f64>| {
            DMatrix::from_element(1, 1, s * x2[0])
        }),
        CoefficientField::jump(1, |_, _, mark: &DVector<f64>| {
            DVector::from_element(1, mark[0])
        }),
        CoefficientField::jump(1, |_, x2: &DVector<f64>, mark: &DVector<f64>| {
            DVector::from_element(1, x2[0] * mark[0])
        }),
        LevyMeasure::scalar_atoms(jumps1)?,
        LevyMeasure::scalar_atoms(jumps2)?,
    )
}

/// Multidimensional Ornstein-Uhlenbeck first component
/// `dX1 = -theta X1 dt + sigma dW1` paired with a linearized second
/// component `dY2 = B2(Y1) Y2 dt + sum_l Sigma2l(Y1) Y2 dW2l + Gamma2 Y2 dN~2`
/// built from `lin` (the exact linear case, no remainder).
pub fn linearized_system(
    theta: f64,
    sigma: f64,
    lin: &LinearizedCoefficients,
    nu2: &LevyMeasure,
) -> Result<CoupledJumpDiffusion, BuildError> {
    let l1 = lin.dim_y1();
    let l2 = lin.dim_y2();
    let d2 = lin.d2();
    let dims = Dims {
        l1,
        l2,
        d1: l1,
        d2,
        n1: 1,
        n2: nu2.mark_dim(),
    };
    let b2 = lin.b2_map();
    let sigmas: Vec<_> = (0..d2).map(|l| lin.sigma2_map(l)).collect();
    let gamma = lin.gamma2_map();
    CoupledJumpDiffusion::new(
        dims,
        CoefficientField::drift(l1, move |x1: &DVector<f64>, _: &DVector<f64>| -x1 * theta),
        CoefficientField::drift(l2, move |x1: &DVector<f64>, x2: &DVector<f64>| b2(x1) * x2),
        CoefficientField::diffusion(l1, l1, move |_, _| {
            DMatrix::identity(l1, l1) * sigma
        }),
        CoefficientField::diffusion(l2, d2, move |x1: &DVector<f64>, x2: &DVector<f64>| {
            let mut m = DMatrix::zeros(l2, d2);
            for (l, s) in sigmas.iter().enumerate() {
                m.set_column(l, &(s(x1) * x2));
            }
            m
        }),
        CoefficientField::zero_jump(l1),
        CoefficientField::jump(l2, move |x1: &DVector<f64>, x2: &DVector<f64>, mark| {
            gamma(x1, mark) * x2
        }),
        LevyMeasure::none(1),
        nu2.clone(),
    )
}

/// Parameters of the stochastic SIR benchmark with saturated incidence.
///
/// ```text
/// dS = [c0 - c1 S - c3 S I / (c4 + c5 S + c6 I)] dt + s1 dW1 + sum marks dN~1
/// dI = [-c2 I + c3 S I / (c4 + c5 S + c6 I)] dt + c7 I dW2 + I sum marks dN~2
/// ```
///
/// Infection jumps are multiplicative with scalar relative sizes
/// `gamma2_atoms`; susceptible-pool jumps are additive with sizes
/// `gamma1_atoms`.
#[derive(Debug, Clone)]
pub struct SirParams {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub c5: f64,
    pub c6: f64,
    pub c7: f64,
    pub sigma1: f64,
    pub gamma1_atoms: Vec<(f64, f64)>,
    pub gamma2_atoms: Vec<(f64, f64)>,
}

impl Default for SirParams {
    fn default() -> Self {
        Self {
            c0: 1.0,
            c1: 1.0,
            c2: 0.5,
            c3: 0.2,
            c4: 1.0,
            c5: 1.0,
            c6: 1.0,
            c7: 0.3,
            sigma1: 0.2,
            gamma1_atoms: vec![(0.1, 0.5)],
            gamma2_atoms: vec![(0.2, 0.5)],
        }
    }
}

impl SirParams {
    pub fn system(&self) -> Result<CoupledJumpDiffusion, BuildError> {
        let p = self.clone();
        let q = self.clone();
        let dims = Dims {
            l1: 1,
            l2: 1,
            d1: 1,
            d2: 1,
            n1: 1,
            n2: 1,
        };
        let sigma1 = self.sigma1;
        let c7 = self.c7;
        CoupledJumpDiffusion::new(
            dims,
            CoefficientField::drift(1, move |x1: &DVector<f64>, x2: &DVector<f64>| {
                let (s, i) = (x1[0], x2[0]);
                DVector::from_element(
                    1,
                    p.c0 - p.c1 * s - p.c3 * s * i / (p.c4 + p.c5 * s + p.c6 * i),
                )
            }),
            CoefficientField::drift(1, move |x1: &DVector<f64>, x2: &DVector<f64>| {
                let (s, i) = (x1[0], x2[0]);
                DVector::from_element(1, -q.c2 * i + q.c3 * s * i / (q.c4 + q.c5 * s + q.c6 * i))
            }),
            CoefficientField::diffusion(1, 1, move |_, _| DMatrix::from_element(1, 1, sigma1)),
            CoefficientField::diffusion(1, 1, move |_, x2: &DVector<f64>| {
                DMatrix::from_element(1, 1, c7 * x2[0])
            }),
            CoefficientField::jump(1, |_, _, mark: &DVector<f64>| {
                DVector::from_element(1, mark[0])
            }),
            CoefficientField::jump(1, |_, x2: &DVector<f64>, mark: &DVector<f64>| {
                DVector::from_element(1, x2[0] * mark[0])
            }),
            LevyMeasure::scalar_atoms(&self.gamma1_atoms)?,
            LevyMeasure::scalar_atoms(&self.gamma2_atoms)?,
        )
    }

    /// The extinction functional of the infected component: the drift of
    /// `-ln I` near `I = 0` is bounded below by
    /// `f1(s) = c2 + c7^2/2 + sum w ghat^2 - c3 s / (c4 + c5 s)`,
    /// so a positive boundary average of `f1` certifies decay of `I`.
    pub fn f1(&self) -> Arc<dyn Fn(&DVector<f64>) -> f64 + Send + Sync> {
        let p = self.clone();
        let jump_term: f64 = self.gamma2_atoms.iter().map(|&(g, w)| w * g * g).sum();
        Arc::new(move |x1: &DVector<f64>| {
            let s = x1[0];
            p.c2 + p.c7 * p.c7 / 2.0 + jump_term - p.c3 * s / (p.c4 + p.c5 * s)
        })
    }
}

/// Stabilization benchmark: an uncontrolled Brownian first component
/// (`b1 = 0`, `sigma1 = I`) driving a scalar second component whose drift
/// `(base + gain * tanh(|x1|^2)) x2` destabilizes once `|x1|` wanders.
/// Feedback on the first component shrinks its stationary spread and
/// restores decay of the second.
pub fn stabilization_benchmark(
    l1: usize,
    base: f64,
    gain: f64,
    x2_noise: f64,
) -> Result<CoupledJumpDiffusion, BuildError> {
    CoupledJumpDiffusion::new(
        Dims {
            l1,
            l2: 1,
            d1: l1,
            d2: 1,
            n1: 1,
            n2: 1,
        },
        CoefficientField::zero_drift(l1),
        CoefficientField::drift(1, move |x1: &DVector<f64>, x2: &DVector<f64>| {
            DVector::from_element(1, (base + gain * x1.norm_squared().tanh()) * x2[0])
        }),
        CoefficientField::diffusion(l1, l1, move |_, _| DMatrix::identity(l1, l1)),
        CoefficientField::diffusion(1, 1, move |_, x2: &DVector<f64>| {
            DMatrix::from_element(1, 1, x2_noise * x2[0])
        }),
        CoefficientField::zero_jump(l1),
        CoefficientField::zero_jump(1),
        LevyMeasure::none(1),
        LevyMeasure::none(1),
    )
}

/// Two-dimensional linearized benchmark: `B2 = diag + rot * J` with an
/// anisotropic noise channel `Sigma21 = s * diag(1, -1)` and an isotropic
/// multiplicative jump `Gamma2 = ghat * I` (which moves the radius but not
/// the angle).
pub fn planar_lin(
    diag: (f64, f64),
    rot: f64,
    noise: f64,
    tanh_gain: f64,
) -> Result<LinearizedCoefficients, BuildError> {
    let b2 = move |y1: &DVector<f64>| {
        let m = tanh_gain * y1[0].tanh();
        DMatrix::from_row_slice(2, 2, &[diag.0 + m, -rot, rot, diag.1 - m])
    };
    let s21 = move |_: &DVector<f64>| DMatrix::from_row_slice(2, 2, &[noise, 0.0, 0.0, -noise]);
    let gamma = move |_: &DVector<f64>, mark: &DVector<f64>| {
        DMatrix::identity(2, 2) * mark[0]
    };
    LinearizedCoefficients::new(1, 2, vec![Arc::new(s21)], Arc::new(b2), Arc::new(gamma))
}
