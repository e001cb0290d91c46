//! Empirical validators for the Lipschitz and linear-growth bounds that a
//! well-posed system must satisfy.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;
use nalgebra::DVector;
use rand::Rng;

use crate::error::SimError;
use crate::rng::{path_rng, StreamTag};
use crate::system::CoupledJumpDiffusion;

/// Result of sampling the difference quotients
///
/// ```text
/// Q1(z, z') = (|b(z)-b(z')|^2 + |sigma(z)-sigma(z')|^2
///              + sum_atoms w |gamma(z,m)-gamma(z',m)|^2) / |z-z'|^2
/// Q2(z)     = (sum_atoms w |gamma(z,m)|^2) / (1 + |z|^2)
/// ```
///
/// over random points in a box. The maxima are lower bounds for the true
/// constants `K1`, `K2`.
#[derive(Debug, Clone)]
pub struct LipschitzReport {
    /// Max observed quotient `Q1` (lower bound for `K1`).
    pub k1_hat: f64,
    /// Max observed quotient `Q2` (lower bound for `K2`).
    pub k2_hat: f64,
    /// Max `Q1` restricted to nested boxes of growing radius.
    pub k1_by_radius: Vec<(f64, f64)>,
    /// Whether `Q1` keeps growing across the nested boxes, indicating that
    /// no global constant exists (super-linear coefficients).
    pub unbounded_trend: bool,
    /// `k1_hat <= declared K1`, when a bound was declared.
    pub k1_pass: Option<bool>,
    /// `k2_hat <= declared K2`, when a bound was declared.
    pub k2_pass: Option<bool>,
}

fn coeff_gap_sq(sys: &CoupledJumpDiffusion, za: &(DVector<f64>, DVector<f64>), zb: &(DVector<f64>, DVector<f64>)) -> f64 {
    let (xa1, xa2) = za;
    let (xb1, xb2) = zb;
    let mut acc = 0.0;
    acc += (sys.drift1().eval_vec(xa1, xa2, None) - sys.drift1().eval_vec(xb1, xb2, None))
        .norm_squared();
    acc += (sys.drift2().eval_vec(xa1, xa2, None) - sys.drift2().eval_vec(xb1, xb2, None))
        .norm_squared();
    acc += (sys.diff1().eval_mat(xa1, xa2, None) - sys.diff1().eval_mat(xb1, xb2, None))
        .norm_squared();
    acc += (sys.diff2().eval_mat(xa1, xa2, None) - sys.diff2().eval_mat(xb1, xb2, None))
        .norm_squared();
    for (mark, w) in sys.levy1().atoms() {
        acc += w
            * (sys.jump1().eval_vec(xa1, xa2, Some(mark))
                - sys.jump1().eval_vec(xb1, xb2, Some(mark)))
            .norm_squared();
    }
    for (mark, w) in sys.levy2().atoms() {
        acc += w
            * (sys.jump2().eval_vec(xa1, xa2, Some(mark))
                - sys.jump2().eval_vec(xb1, xb2, Some(mark)))
            .norm_squared();
    }
    acc
}

fn jump_mass_sq(sys: &CoupledJumpDiffusion, z: &(DVector<f64>, DVector<f64>)) -> f64 {
    let (x1, x2) = z;
    let mut acc = 0.0;
    for (mark, w) in sys.levy1().atoms() {
        acc += w * sys.jump1().eval_vec(x1, x2, Some(mark)).norm_squared();
    }
    for (mark, w) in sys.levy2().atoms() {
        acc += w * sys.jump2().eval_vec(x1, x2, Some(mark)).norm_squared();
    }
    acc
}

/// Estimate the Lipschitz/growth quotients of `system` on the centered box
/// of radius `box_radius` from `sample_count` random point pairs.
///
/// Declared bounds (when given) turn the report into a pass/fail check;
/// they do not affect the estimates.
pub fn validate_lipschitz(
    system: &CoupledJumpDiffusion,
    sample_count: usize,
    box_radius: f64,
    declared_k1: Option<f64>,
    declared_k2: Option<f64>,
) -> Result<LipschitzReport, SimError> {
    if sample_count < 2 {
        return Err(SimError::config("sample_count must be >= 2"));
    }
    if !(box_radius > 0.0 && box_radius.is_finite()) {
        return Err(SimError::config("box_radius must be positive"));
    }
    let d = system.dims();
    let mut rng = path_rng(0x4c6970, 0, StreamTag::Probe);
    let radii = [box_radius / 4.0, box_radius / 2.0, box_radius];
    let per_radius = (sample_count / radii.len()).max(1);

    let mut k1_hat: f64 = 0.0;
    let mut k2_hat: f64 = 0.0;
    let mut k1_by_radius = Vec::with_capacity(radii.len());
    for &r in &radii {
        let mut k1_r: f64 = 0.0;
        for _ in 0..per_radius {
            let sample = |rng: &mut rand_chacha::ChaCha8Rng| {
                (
                    DVector::from_fn(d.l1, |_, _| rng.random_range(-r..r)),
                    DVector::from_fn(d.l2, |_, _| rng.random_range(-r..r)),
                )
            };
            let za = sample(&mut rng);
            let zb = sample(&mut rng);
            let gap_sq = (za.0.clone() - &zb.0).norm_squared()
                + (za.1.clone() - &zb.1).norm_squared();
            if gap_sq > 1e-24 {
                k1_r = k1_r.max(coeff_gap_sq(system, &za, &zb) / gap_sq);
            }
            let z_sq = za.0.norm_squared() + za.1.norm_squared();
            k2_hat = k2_hat.max(jump_mass_sq(system, &za) / (1.0 + z_sq));
        }
        k1_hat = k1_hat.max(k1_r);
        k1_by_radius.push((r, k1_r));
    }

    // growing maxima across nested boxes indicate super-linear coefficients
    let unbounded_trend = k1_by_radius
        .windows(2)
        .all(|w| w[1].1 > 1.5 * w[0].1.max(1e-12))
        && k1_by_radius.last().map(|&(_, q)| q).unwrap_or(0.0) > 0.0;

    Ok(LipschitzReport {
        k1_hat,
        k2_hat,
        k1_by_radius,
        unbounded_trend,
        k1_pass: declared_k1.map(|k| k1_hat <= k),
        k2_pass: declared_k2.map(|k| k2_hat <= k),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks;
    use crate::system::{CoefficientField, CoupledJumpDiffusion, Dims};
    use crate::LevyMeasure;

    #[test]
    fn zero_system_has_zero_quotients() {
        let sys = benchmarks::scalar_linear(0.0, 0.0, &[], 0.0, 0.0, &[], 0.0).unwrap();
        let rep = validate_lipschitz(&sys, 300, 5.0, Some(0.1), None).unwrap();
        assert_eq!(rep.k1_hat, 0.0);
        assert_eq!(rep.k2_hat, 0.0);
        assert_eq!(rep.k1_pass, Some(true));
        assert!(!rep.unbounded_trend);
    }

    #[test]
    fn linear_system_quotient_bounded_by_coefficients() {
        // b1 = -2 x1, b2 = -x2: |b(z)-b(z')|^2 <= 4 |z-z'|^2
        let sys = benchmarks::scalar_linear(2.0, 0.0, &[], -1.0, 0.0, &[], 0.0).unwrap();
        let rep = validate_lipschitz(&sys, 600, 3.0, Some(4.0 + 1e-9), None).unwrap();
        assert!(rep.k1_hat <= 4.0 + 1e-9, "{}", rep.k1_hat);
        assert!(rep.k1_hat > 3.0, "{}", rep.k1_hat);
        assert_eq!(rep.k1_pass, Some(true));
        assert!(!rep.unbounded_trend);
    }

    #[test]
    fn quadratic_drift_flags_unbounded_trend() {
        let sys = CoupledJumpDiffusion::new(
            Dims {
                l1: 1,
                l2: 1,
                d1: 1,
                d2: 1,
                n1: 1,
                n2: 1,
            },
            CoefficientField::zero_drift(1),
            CoefficientField::drift(1, |_, x2: &DVector<f64>| {
                DVector::from_element(1, x2[0] * x2[0])
            }),
            CoefficientField::zero_diffusion(1, 1),
            CoefficientField::zero_diffusion(1, 1),
            CoefficientField::zero_jump(1),
            CoefficientField::zero_jump(1),
            LevyMeasure::none(1),
            LevyMeasure::none(1),
        )
        .unwrap();
        let rep = validate_lipschitz(&sys, 900, 10.0, None, None).unwrap();
        assert!(rep.unbounded_trend, "{:?}", rep.k1_by_radius);
    }
}
