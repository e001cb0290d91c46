//! The drift-diffusion-jump generator applied to scalar test functions.
//!
//! For `g` on the stacked state `z = (x1, x2)` the generator is
//!
//! ```text
//! L g(z) = grad(g)' b(z) + 1/2 tr( sigma(z) sigma(z)' Hess(g) )
//!        + sum_channels sum_atoms w [ g(z + emb(gamma(z, mark))) - g(z)
//!                                     - grad(g)' emb(gamma(z, mark)) ]
//! ```
//!
//! where `emb` embeds a per-component jump displacement into the stacked
//! space and the Brownian motions of the two components are independent, so
//! the diffusion term splits into the two diagonal blocks.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::sync::Arc;
use nalgebra::{DMatrix, DVector};

use crate::system::CoupledJumpDiffusion;

type F64Field = dyn Fn(&DVector<f64>) -> f64 + Send + Sync;
type GradField = dyn Fn(&DVector<f64>) -> DVector<f64> + Send + Sync;
type HessField = dyn Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync;

/// A twice-differentiable scalar field with optional analytic gradient and
/// Hessian evaluators. Missing derivatives fall back to central differences
/// with step `1e-5 * (1 + |z|)`.
#[derive(Clone)]
pub struct ScalarField {
    f: Arc<F64Field>,
    grad: Option<Arc<GradField>>,
    hess: Option<Arc<HessField>>,
}

impl ScalarField {
    pub fn new<F>(f: F) -> Self
    where
        F: Fn(&DVector<f64>) -> f64 + Send + Sync + 'static,
    {
        Self {
            f: Arc::new(f),
            grad: None,
            hess: None,
        }
    }

    pub fn with_gradient<G>(mut self, grad: G) -> Self
    where
        G: Fn(&DVector<f64>) -> DVector<f64> + Send + Sync + 'static,
    {
        self.grad = Some(Arc::new(grad));
        self
    }

    pub fn with_hessian<H>(mut self, hess: H) -> Self
    where
        H: Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync + 'static,
    {
        self.hess = Some(Arc::new(hess));
        self
    }

    pub fn eval(&self, z: &DVector<f64>) -> f64 {
        (self.f)(z)
    }

    fn fd_step(z: &DVector<f64>) -> f64 {
        1e-5 * (1.0 + z.norm())
    }

    pub fn gradient(&self, z: &DVector<f64>) -> DVector<f64> {
        if let Some(g) = &self.grad {
            return g(z);
        }
        let h = Self::fd_step(z);
        let n = z.len();
        let mut out = DVector::zeros(n);
        let mut zp = z.clone();
        for i in 0..n {
            zp[i] = z[i] + h;
            let fp = self.eval(&zp);
            zp[i] = z[i] - h;
            let fm = self.eval(&zp);
            zp[i] = z[i];
            out[i] = (fp - fm) / (2.0 * h);
        }
        out
    }

    pub fn hessian(&self, z: &DVector<f64>) -> DMatrix<f64> {
        if let Some(hs) = &self.hess {
            return hs(z);
        }
        let h = Self::fd_step(z);
        let n = z.len();
        let f0 = self.eval(z);
        let mut out = DMatrix::zeros(n, n);
        let mut zp = z.clone();
        for i in 0..n {
            zp[i] = z[i] + h;
            let fp = self.eval(&zp);
            zp[i] = z[i] - h;
            let fm = self.eval(&zp);
            zp[i] = z[i];
            out[(i, i)] = (fp - 2.0 * f0 + fm) / (h * h);
        }
        for i in 0..n {
            for j in (i + 1)..n {
                zp[i] = z[i] + h;
                zp[j] = z[j] + h;
                let fpp = self.eval(&zp);
                zp[j] = z[j] - h;
                let fpm = self.eval(&zp);
                zp[i] = z[i] - h;
                zp[j] = z[j] + h;
                let fmp = self.eval(&zp);
                zp[j] = z[j] - h;
                let fmm = self.eval(&zp);
                zp[i] = z[i];
                zp[j] = z[j];
                let v = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
                out[(i, j)] = v;
                out[(j, i)] = v;
            }
        }
        out
    }
}

/// Evaluate the generator of `system` on `g` at the stacked state
/// `z = (x1, x2)`. Both Lévy measures must be finite (they are by
/// construction: weighted atoms).
pub fn apply_generator(
    system: &CoupledJumpDiffusion,
    g: &ScalarField,
    z: (&DVector<f64>, &DVector<f64>),
) -> f64 {
    let (x1, x2) = z;
    let d = system.dims();
    let zfull = stack(x1, x2);
    let grad = g.gradient(&zfull);
    let hess = g.hessian(&zfull);

    // drift term
    let b = system.full_drift(x1, x2);
    let mut acc = grad.dot(&b);

    // diffusion term: independent W1/W2 make sigma sigma' block diagonal
    let s1 = system.diff1().eval_mat(x1, x2, None);
    let s2 = system.diff2().eval_mat(x1, x2, None);
    let h11 = hess.view((0, 0), (d.l1, d.l1)).into_owned();
    let h22 = hess.view((d.l1, d.l1), (d.l2, d.l2)).into_owned();
    acc += 0.5 * (&s1 * s1.transpose() * h11).trace();
    acc += 0.5 * (&s2 * s2.transpose() * h22).trace();

    // jump terms, channel by channel, atoms make the integrals exact sums
    let g0 = g.eval(&zfull);
    for (mark, w) in system.levy1().atoms() {
        if *w == 0.0 {
            continue;
        }
        let disp = system.jump1().eval_vec(x1, x2, Some(mark));
        let mut zj = zfull.clone();
        zj.rows_mut(0, d.l1).axpy(1.0, &disp, 1.0);
        let lin = grad.rows(0, d.l1).dot(&disp);
        acc += w * (g.eval(&zj) - g0 - lin);
    }
    for (mark, w) in system.levy2().atoms() {
        if *w == 0.0 {
            continue;
        }
        let disp = system.jump2().eval_vec(x1, x2, Some(mark));
        let mut zj = zfull.clone();
        zj.rows_mut(d.l1, d.l2).axpy(1.0, &disp, 1.0);
        let lin = grad.rows(d.l1, d.l2).dot(&disp);
        acc += w * (g.eval(&zj) - g0 - lin);
    }
    acc
}

fn stack(x1: &DVector<f64>, x2: &DVector<f64>) -> DVector<f64> {
    let mut z = DVector::zeros(x1.len() + x2.len());
    z.rows_mut(0, x1.len()).copy_from(x1);
    z.rows_mut(x1.len(), x2.len()).copy_from(x2);
    z
}
