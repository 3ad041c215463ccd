use std::fmt;

use crate::error::{CarnotError, Result};
use crate::poly::{coord_name, CompiledPoly, Polynomial};
use crate::rational::{fmt_q, Q};

/// A vector field with polynomial components in the coordinate frame `∂_a`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyVectorField {
    pub components: Vec<Polynomial>,
}

impl PolyVectorField {
    pub fn new(components: Vec<Polynomial>) -> Self {
        PolyVectorField { components }
    }

    pub fn zero(n: usize) -> Self {
        PolyVectorField { components: vec![Polynomial::zero(); n] }
    }

    /// The coordinate field `∂_a`.
    pub fn coordinate(n: usize, a: usize) -> Self {
        let mut f = Self::zero(n);
        f.components[a] = Polynomial::constant(crate::rational::q_int(1));
        f
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Polynomial::is_zero)
    }

    /// `Z(f) = Σ_a Z_a ∂_a f`.
    pub fn apply(&self, f: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (a, za) in self.components.iter().enumerate() {
            if za.is_zero() {
                continue;
            }
            let d = f.deriv(a);
            if !d.is_zero() {
                out += &(za * &d);
            }
        }
        out
    }

    /// `[X, Y] = X Y − Y X` as derivations.
    pub fn lie_bracket(&self, other: &PolyVectorField) -> PolyVectorField {
        PolyVectorField::new(
            (0..self.dim())
                .map(|c| &self.apply(&other.components[c]) - &other.apply(&self.components[c]))
                .collect(),
        )
    }

    pub fn add(&self, other: &PolyVectorField) -> PolyVectorField {
        PolyVectorField::new(self.components.iter().zip(&other.components).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &PolyVectorField) -> PolyVectorField {
        PolyVectorField::new(self.components.iter().zip(&other.components).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, c: &Q) -> PolyVectorField {
        PolyVectorField::new(self.components.iter().map(|p| p.scale(c)).collect())
    }

    /// Multiplies every component by the function `f`.
    pub fn mul_function(&self, f: &Polynomial) -> PolyVectorField {
        PolyVectorField::new(self.components.iter().map(|p| p * f).collect())
    }

    pub fn eval(&self, x: &[Q]) -> Vec<Q> {
        self.components.iter().map(|p| p.eval(x)).collect()
    }

    pub fn eval_f64(&self, x: &[f64]) -> Vec<f64> {
        self.components.iter().map(|p| p.eval_f64(x)).collect()
    }

    pub fn compile(&self) -> CompiledField {
        CompiledField { components: self.components.iter().map(Polynomial::compile).collect() }
    }

    /// Linear combination `Σ_i c_i F_i` with polynomial coefficients.
    pub fn combination(fields: &[PolyVectorField], coeffs: &[Polynomial]) -> PolyVectorField {
        let n = fields.first().map_or(0, PolyVectorField::dim);
        let mut out = PolyVectorField::zero(n);
        for (f, c) in fields.iter().zip(coeffs) {
            if c.is_zero() {
                continue;
            }
            for (o, p) in out.components.iter_mut().zip(&f.components) {
                *o += &(c * p);
            }
        }
        out
    }

    pub fn check_dim(&self, n: usize) -> Result<()> {
        if self.dim() != n {
            return Err(CarnotError::DimensionMismatch { expected: n, got: self.dim() });
        }
        Ok(())
    }

    /// Human-readable rendering such as `∂x1 - 1/2*x2*∂x3`.
    pub fn fmt_with(&self, weights: &[u32]) -> String {
        let mut parts = Vec::new();
        for (a, p) in self.components.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let coeff = p.fmt_named(weights, &coord_name);
            let sym = format!("∂{}", coord_name(a));
            if coeff == "1" {
                parts.push(sym);
            } else if p.num_terms() == 1 {
                parts.push(format!("{coeff}*{sym}"));
            } else {
                parts.push(format!("({coeff})*{sym}"));
            }
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ").replace("+ -", "- ")
        }
    }

    /// One `coeff * monomial * basis_symbol` line per term.
    pub fn machine_lines(&self, basis_symbol: &dyn Fn(usize) -> String, weights: &[u32]) -> Vec<String> {
        let mut out = Vec::new();
        for (a, p) in self.components.iter().enumerate() {
            for (m, c) in p.sorted_terms(weights) {
                let mono = if m.is_one() { "1".to_string() } else { m.fmt_with(&coord_name) };
                out.push(format!("{} * {} * {}", fmt_q(c), mono, basis_symbol(a)));
            }
        }
        out
    }
}

impl fmt::Display for PolyVectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fmt_with(&[]))
    }
}

/// `f64` evaluation form of a [`PolyVectorField`].
#[derive(Clone, Debug)]
pub struct CompiledField {
    pub components: Vec<CompiledPoly>,
}

impl CompiledField {
    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        for (o, p) in out.iter_mut().zip(&self.components) {
            *o = p.eval(x);
        }
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.components.iter().map(|p| p.eval(x)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_polynomial;

    fn field(parts: &[&str]) -> PolyVectorField {
        PolyVectorField::new(parts.iter().map(|p| parse_polynomial(p).unwrap()).collect())
    }

    #[test]
    fn bracket_of_coordinate_rotations() {
        // [x2 ∂1 - x1 ∂2, ∂1] = ∂2
        let rot = field(&["x2", "-x1"]);
        let d1 = PolyVectorField::coordinate(2, 0);
        assert_eq!(rot.lie_bracket(&d1), PolyVectorField::coordinate(2, 1));
        assert!(rot.lie_bracket(&rot).is_zero());
    }

    #[test]
    fn display() {
        let x1 = field(&["1", "0", "-1/2*x2"]);
        assert_eq!(x1.to_string(), "∂x1 - 1/2*x2*∂x3");
    }
}
