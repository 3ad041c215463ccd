use std::collections::HashMap;

use crate::error::{CarnotError, Result};
use crate::group::PolyVectorField;
use crate::poly::{CompiledPoly, Polynomial};
use crate::rational::{q_int, Q};

/// A polynomial map `R^n → R^n`, optionally carrying a polynomial inverse.
///
/// Variables with index `>= n` are treated as parameters: they are never
/// differentiated or substituted, so maps like `x ↦ y·x` with symbolic `y`
/// are ordinary `PolyMap`s.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMap {
    pub components: Vec<Polynomial>,
    inverse: Option<Vec<Polynomial>>,
}

impl PolyMap {
    pub fn new(components: Vec<Polynomial>) -> Self {
        PolyMap { components, inverse: None }
    }

    pub fn with_inverse(components: Vec<Polynomial>, inverse: Vec<Polynomial>) -> Self {
        PolyMap { components, inverse: Some(inverse) }
    }

    pub fn identity(n: usize) -> Self {
        let id: Vec<Polynomial> = (0..n).map(Polynomial::var).collect();
        PolyMap::with_inverse(id.clone(), id)
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn has_inverse(&self) -> bool {
        self.inverse.is_some()
    }

    pub fn inverse(&self) -> Result<PolyMap> {
        let inv = self.inverse.clone().ok_or(CarnotError::MissingInverse)?;
        Ok(PolyMap::with_inverse(inv, self.components.clone()))
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &PolyMap) -> PolyMap {
        let components = self.components.iter().map(|p| p.compose(&inner.components)).collect();
        let inverse = match (&inner.inverse, &self.inverse) {
            (Some(ii), Some(si)) => Some(ii.iter().map(|p| p.compose(si)).collect()),
            _ => None,
        };
        PolyMap { components, inverse }
    }

    pub fn apply(&self, x: &[Q]) -> Vec<Q> {
        self.components.iter().map(|p| p.eval(x)).collect()
    }

    pub fn apply_f64(&self, x: &[f64]) -> Vec<f64> {
        self.components.iter().map(|p| p.eval_f64(x)).collect()
    }

    /// `J[c][b] = ∂F_c/∂x_b`.
    pub fn jacobian(&self) -> Vec<Vec<Polynomial>> {
        let n = self.dim();
        self.components.iter().map(|p| (0..n).map(|b| p.deriv(b)).collect()).collect()
    }

    pub fn jacobian_det(&self) -> Polynomial {
        poly_det(&self.jacobian())
    }

    /// `(F_* Z)(y) = DF(F⁻¹ y) · Z(F⁻¹ y)`.
    pub fn pushforward(&self, z: &PolyVectorField) -> Result<PolyVectorField> {
        z.check_dim(self.dim())?;
        let inv = self.inverse.as_ref().ok_or(CarnotError::MissingInverse)?;
        let jac = self.jacobian();
        let comps = jac
            .iter()
            .map(|row| {
                let mut acc = Polynomial::zero();
                for (d, zb) in row.iter().zip(&z.components) {
                    if !d.is_zero() && !zb.is_zero() {
                        acc += &(d * zb);
                    }
                }
                acc.compose(inv)
            })
            .collect();
        Ok(PolyVectorField::new(comps))
    }

    /// Numerical image `F(x)` and differential `DF(x)` (row-major).
    pub fn compile(&self) -> CompiledMap {
        CompiledMap {
            components: self.components.iter().map(Polynomial::compile).collect(),
            jacobian: self.jacobian().iter().map(|r| r.iter().map(Polynomial::compile).collect()).collect(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CompiledMap {
    pub components: Vec<CompiledPoly>,
    pub jacobian: Vec<Vec<CompiledPoly>>,
}

impl CompiledMap {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.components.iter().map(|p| p.eval(x)).collect()
    }

    pub fn differential(&self, x: &[f64]) -> Vec<Vec<f64>> {
        self.jacobian.iter().map(|r| r.iter().map(|p| p.eval(x)).collect()).collect()
    }
}

/// Determinant of a square polynomial matrix by Laplace expansion along
/// rows, memoized on the set of columns already used and skipping zeros.
pub fn poly_det(m: &[Vec<Polynomial>]) -> Polynomial {
    let n = m.len();
    assert!(n <= 63, "matrix too large for bitmask expansion");
    fn rec(m: &[Vec<Polynomial>], row: usize, used: u64, memo: &mut HashMap<u64, Polynomial>) -> Polynomial {
        if row == m.len() {
            return Polynomial::constant(q_int(1));
        }
        if let Some(p) = memo.get(&used) {
            return p.clone();
        }
        let mut acc = Polynomial::zero();
        for (col, entry) in m[row].iter().enumerate() {
            if used & (1 << col) != 0 || entry.is_zero() {
                continue;
            }
            // Sign from the number of unused columns before `col`.
            let skipped = (0..col).filter(|c| used & (1 << c) == 0).count();
            let minor = rec(m, row + 1, used | (1 << col), memo);
            if minor.is_zero() {
                continue;
            }
            let term = entry * &minor;
            if skipped % 2 == 0 {
                acc += &term;
            } else {
                acc -= &term;
            }
        }
        memo.insert(used, acc.clone());
        acc
    }
    rec(m, 0, 0, &mut HashMap::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_polynomial;

    fn p(s: &str) -> Polynomial {
        parse_polynomial(s).unwrap()
    }

    #[test]
    fn determinant_small() {
        let m = vec![vec![p("x1"), p("2")], vec![p("x2"), p("x1")]];
        assert_eq!(poly_det(&m), p("x1^2 - 2*x2"));
        let perm = vec![vec![p("0"), p("1"), p("0")], vec![p("0"), p("0"), p("1")], vec![p("1"), p("0"), p("0")]];
        assert_eq!(poly_det(&perm), p("1"));
        let swap = vec![vec![p("0"), p("1")], vec![p("1"), p("0")]];
        assert_eq!(poly_det(&swap), p("-1"));
    }

    #[test]
    fn compose_tracks_inverse() {
        let f = PolyMap::with_inverse(vec![p("x1"), p("x2 + x1^2")], vec![p("x1"), p("x2 - x1^2")]);
        let g = f.compose(&f);
        let id = g.compose(&g.inverse().unwrap());
        assert_eq!(id.components, PolyMap::identity(2).components);
    }
}
