//! Finite jump-intensity measures represented as weighted atoms.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::format;
use alloc::vec::Vec;
use nalgebra::DVector;

use crate::error::BuildError;

/// A finite Lévy (jump-intensity) measure on `R^n \ {0}`, stored as a list
/// of `(mark, weight)` atoms. `weight` has units of events per unit time;
/// the atom triggers Poisson arrivals of rate `weight` whose displacement
/// is the jump coefficient evaluated at the pre-jump state and `mark`.
///
/// Atoms make the compensator integral of a finite-activity measure exact:
/// `∫ γ(z, φ) ν(dφ) = Σ_a weight_a · γ(z, mark_a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevyMeasure {
    mark_dim: usize,
    atoms: Vec<(DVector<f64>, f64)>,
}

impl LevyMeasure {
    /// Build a measure from `(mark, weight)` atoms.
    ///
    /// Marks must be nonzero vectors of dimension `mark_dim` and weights
    /// finite and nonnegative.
    pub fn new(mark_dim: usize, atoms: Vec<(DVector<f64>, f64)>) -> Result<Self, BuildError> {
        for (i, (mark, weight)) in atoms.iter().enumerate() {
            if mark.len() != mark_dim {
                return Err(BuildError::Shape {
                    what: format!("mark of atom {i}"),
                    expected: (mark_dim, 1),
                    got: (mark.len(), 1),
                });
            }
            if mark.iter().all(|&m| m == 0.0) {
                return Err(BuildError::invariant(format!(
                    "atom {i}: marks must be nonzero (the measure lives on R^n minus the origin)"
                )));
            }
            if !mark.iter().all(|m| m.is_finite()) {
                return Err(BuildError::invariant(format!("atom {i}: non-finite mark")));
            }
            if !(weight.is_finite() && *weight >= 0.0) {
                return Err(BuildError::invariant(format!(
                    "atom {i}: weight must be finite and nonnegative, got {weight}"
                )));
            }
        }
        Ok(Self { mark_dim, atoms })
    }

    /// The measure with no atoms (no jumps on this channel).
    pub fn none(mark_dim: usize) -> Self {
        Self {
            mark_dim,
            atoms: Vec::new(),
        }
    }

    /// Convenience: scalar marks `gamma_hat` with weights, mark dimension 1.
    pub fn scalar_atoms(atoms: &[(f64, f64)]) -> Result<Self, BuildError> {
        Self::new(
            1,
            atoms
                .iter()
                .map(|&(m, w)| (DVector::from_element(1, m), w))
                .collect(),
        )
    }

    pub fn mark_dim(&self) -> usize {
        self.mark_dim
    }

    pub fn atoms(&self) -> &[(DVector<f64>, f64)] {
        &self.atoms
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Total mass `Σ weights` (the overall jump arrival rate).
    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|(_, w)| *w).sum()
    }

    /// Scale every weight by `factor` (used by time-changed systems).
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            mark_dim: self.mark_dim,
            atoms: self
                .atoms
                .iter()
                .map(|(m, w)| (m.clone(), w * factor))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn rejects_zero_mark() {
        let err = LevyMeasure::new(2, vec![(DVector::zeros(2), 1.0)]);
        assert!(err.is_err());
    }

    #[test]
    fn rejects_negative_weight() {
        assert!(LevyMeasure::scalar_atoms(&[(0.5, -1.0)]).is_err());
    }

    #[test]
    fn mass_is_weight_sum() {
        let nu = LevyMeasure::scalar_atoms(&[(0.5, 1.0), (-0.25, 2.5)]).unwrap();
        assert_eq!(nu.total_mass(), 3.5);
        assert_eq!(nu.mark_dim(), 1);
    }
}
