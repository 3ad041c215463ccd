//! Vector fields evaluated numerically, in the left-invariant frame.

use crate::error::Result;
use crate::group::{CarnotGroup, PolyVectorField};
use crate::poly::{CompiledPoly, Poly};
use crate::rational::Scalar;

/// A vector field that can be evaluated at points of the group.
pub trait NumericField: Sync {
    fn dim(&self) -> usize;

    /// Coefficients `z_a(x)` with `Z = Σ z_a X_a`.
    fn left_at(&self, group: &CarnotGroup, x: &[f64]) -> Vec<f64>;

    /// Coordinate components at `x`.
    fn coordinates_at(&self, group: &CarnotGroup, x: &[f64]) -> Vec<f64> {
        let z = self.left_at(group, x);
        let f = group.left_frame_matrix_f64(x);
        f.iter().map(|row| row.iter().zip(&z).map(|(a, b)| a * b).sum()).collect()
    }
}

/// A field whose left-frame coefficients are polynomials.
#[derive(Clone, Debug)]
pub struct LeftPolyField {
    pub coefficients: Vec<CompiledPoly>,
}

impl LeftPolyField {
    pub fn from_field(group: &CarnotGroup, z: &PolyVectorField) -> Result<Self> {
        Ok(Self::from_coefficients(&group.left_coefficients(z)?))
    }

    pub fn from_coefficients<C: Scalar>(z: &[Poly<C>]) -> Self {
        LeftPolyField { coefficients: z.iter().map(Poly::compile).collect() }
    }
}

impl NumericField for LeftPolyField {
    fn dim(&self) -> usize {
        self.coefficients.len()
    }

    fn left_at(&self, _group: &CarnotGroup, x: &[f64]) -> Vec<f64> {
        self.coefficients.iter().map(|p| p.eval(x)).collect()
    }
}

/// A field given by a closure returning coordinate components.
pub struct CoordinateFn<F> {
    pub n: usize,
    pub f: F,
}

impl<F: Fn(&[f64]) -> Vec<f64> + Sync> NumericField for CoordinateFn<F> {
    fn dim(&self) -> usize {
        self.n
    }

    fn left_at(&self, group: &CarnotGroup, x: &[f64]) -> Vec<f64> {
        group.to_left_coefficients_f64(x, &(self.f)(x))
    }

    fn coordinates_at(&self, _group: &CarnotGroup, x: &[f64]) -> Vec<f64> {
        (self.f)(x)
    }
}
