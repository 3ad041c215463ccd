//! Carnot groups in exponential coordinates of the first kind.
//!
//! A point is the coordinate vector of its logarithm in the adapted basis,
//! so the identity is `0` and `x⁻¹ = −x`. The group law is a polynomial map
//! computed once from the BCH series; frames, coframes and translations are
//! derived from it symbolically.

mod bch;
mod field;
mod map;
mod numeric;

use crate::algebra::{builtin, StratifiedLieAlgebra};
use crate::error::{CarnotError, Result};
use crate::poly::{CompiledPoly, Polynomial};
use crate::rational::{q_int, Ring, Q};

pub use bch::{bch_generic, dynkin_words, group_law};
pub use field::{CompiledField, PolyVectorField};
pub use map::{poly_det, CompiledMap, PolyMap};
pub use numeric::{CoordinateFn, LeftPolyField, NumericField};

/// Exponential coordinates of a group element.
pub type GroupPoint = Vec<Q>;

#[derive(Clone, Debug)]
pub struct CarnotGroup {
    alg: StratifiedLieAlgebra,
    weights: Vec<u32>,
    law: Vec<Polynomial>,
    law_compiled: Vec<CompiledPoly>,
    left: Vec<PolyVectorField>,
    right: Vec<PolyVectorField>,
    left_coframe: Vec<Vec<Polynomial>>,
    right_coframe: Vec<Vec<Polynomial>>,
    left_compiled: Vec<CompiledField>,
    left_coframe_compiled: Vec<Vec<CompiledPoly>>,
}

impl CarnotGroup {
    /// Builds the group of a validated algebra.
    pub fn new(alg: StratifiedLieAlgebra) -> Result<Self> {
        let report = alg.validate();
        if !report.all_passed() {
            return Err(CarnotError::InvalidAlgebra(report.to_string()));
        }
        let n = alg.dim();
        let weights = alg.weights();
        let law = group_law(&alg);

        // X_a(x) = ∂/∂y_a P(x, y) at y = 0.
        let zero_y: Vec<(usize, Q)> = (0..n).map(|a| (n + a, q_int(0))).collect();
        let left: Vec<PolyVectorField> = (0..n)
            .map(|a| PolyVectorField::new(law.iter().map(|p| p.deriv(n + a).eval_partial(&zero_y)).collect()))
            .collect();
        // X^R_a(x) = ∂/∂x_a P(x, y) at x = 0, renamed y → x.
        let zero_x: Vec<(usize, Q)> = (0..n).map(|a| (a, q_int(0))).collect();
        let right: Vec<PolyVectorField> = (0..n)
            .map(|a| {
                PolyVectorField::new(
                    law.iter()
                        .map(|p| p.deriv(a).eval_partial(&zero_x).rename_vars(|v| v - n))
                        .collect(),
                )
            })
            .collect();

        let left_coframe = invert_unipotent(&frame_matrix(&left), alg.step());
        let right_coframe = invert_unipotent(&frame_matrix(&right), alg.step());
        let law_compiled = law.iter().map(Polynomial::compile).collect();
        let left_compiled = left.iter().map(PolyVectorField::compile).collect();
        let left_coframe_compiled =
            left_coframe.iter().map(|r| r.iter().map(Polynomial::compile).collect()).collect();
        Ok(CarnotGroup {
            alg,
            weights,
            law,
            law_compiled,
            left,
            right,
            left_coframe,
            right_coframe,
            left_compiled,
            left_coframe_compiled,
        })
    }

    /// Shortcut for `CarnotGroup::new(builtin(name)?)`.
    pub fn builtin(name: &str) -> Result<Self> {
        Self::new(builtin(name)?)
    }

    pub fn algebra(&self) -> &StratifiedLieAlgebra {
        &self.alg
    }

    pub fn dim(&self) -> usize {
        self.alg.dim()
    }

    pub fn step(&self) -> usize {
        self.alg.step()
    }

    /// Weighted degree of each coordinate (its layer).
    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn homogeneous_dimension(&self) -> usize {
        self.alg.homogeneous_dimension()
    }

    /// The group law `P(x, y)` in variables `x = 0..n`, `y = n..2n`.
    pub fn law(&self) -> &[Polynomial] {
        &self.law
    }

    pub fn check_point(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(CarnotError::DimensionMismatch { expected: self.dim(), got: len });
        }
        Ok(())
    }

    /// Exact product `x · y`.
    pub fn product(&self, x: &[Q], y: &[Q]) -> Result<GroupPoint> {
        self.check_point(x.len())?;
        self.check_point(y.len())?;
        let xy: Vec<Q> = x.iter().chain(y).cloned().collect();
        Ok(self.law.iter().map(|p| p.eval(&xy)).collect())
    }

    /// Floating-point product `x · y`.
    pub fn product_f64(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let mut xy = Vec::with_capacity(2 * x.len());
        xy.extend_from_slice(x);
        xy.extend_from_slice(y);
        self.law_compiled.iter().map(|p| p.eval(&xy)).collect()
    }

    pub fn inverse(&self, x: &[Q]) -> GroupPoint {
        x.iter().map(|c| -c).collect()
    }

    pub fn inverse_f64(&self, x: &[f64]) -> Vec<f64> {
        x.iter().map(|c| -c).collect()
    }

    fn specialize(&self, first: Option<&[Q]>, second: Option<&[Q]>) -> Vec<Polynomial> {
        let n = self.dim();
        // Second factor variables must move to 0..n when the first is fixed.
        let mut vals: Vec<(usize, Q)> = Vec::new();
        if let Some(a) = first {
            vals.extend(a.iter().cloned().enumerate());
        }
        if let Some(b) = second {
            vals.extend(b.iter().cloned().enumerate().map(|(i, c)| (n + i, c)));
        }
        self.law
            .iter()
            .map(|p| {
                let q = p.eval_partial(&vals);
                if first.is_some() {
                    q.rename_vars(|v| v - n)
                } else {
                    q
                }
            })
            .collect()
    }

    /// `ℓ_a(x) = a · x`.
    pub fn left_translation(&self, a: &[Q]) -> Result<PolyMap> {
        self.check_point(a.len())?;
        let inv = self.inverse(a);
        Ok(PolyMap::with_inverse(self.specialize(Some(a), None), self.specialize(Some(&inv), None)))
    }

    /// `r_a(x) = x · a`.
    pub fn right_translation(&self, a: &[Q]) -> Result<PolyMap> {
        self.check_point(a.len())?;
        let inv = self.inverse(a);
        Ok(PolyMap::with_inverse(self.specialize(None, Some(a)), self.specialize(None, Some(&inv))))
    }

    /// `x ↦ y · x` with the translation parameter `y` held in variables `n..2n`.
    pub fn left_translation_symbolic(&self) -> PolyMap {
        let n = self.dim();
        let swap = |v: usize| if v < n { v + n } else { v - n };
        let comps: Vec<Polynomial> = self.law.iter().map(|p| p.rename_vars(swap)).collect();
        PolyMap::with_inverse(comps.clone(), negate_params(&comps, n))
    }

    /// `x ↦ x · y` with `y` held in variables `n..2n`.
    pub fn right_translation_symbolic(&self) -> PolyMap {
        let n = self.dim();
        PolyMap::with_inverse(self.law.clone(), negate_params(&self.law, n))
    }

    /// `δ_t`, scaling coordinate `(l, v)` by `t^l`.
    pub fn dilation(&self, t: &Q) -> Result<PolyMap> {
        if *t <= Q::from_integer(0.into()) {
            return Err(CarnotError::NonPositiveScale(crate::rational::q_to_f64(t)));
        }
        let scaled = |s: &Q| -> Vec<Polynomial> {
            self.weights
                .iter()
                .enumerate()
                .map(|(a, &w)| Polynomial::var(a).scale(&num_traits::pow(s.clone(), w as usize)))
                .collect()
        };
        Ok(PolyMap::with_inverse(scaled(t), scaled(&(Q::from_integer(1.into()) / t))))
    }

    pub fn dilate_point(&self, t: f64, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.weights).map(|(c, &w)| c * t.powi(w as i32)).collect()
    }

    /// Left-invariant frame `X_a` in the coordinate frame.
    pub fn left_frame(&self) -> &[PolyVectorField] {
        &self.left
    }

    /// Right-invariant frame `X^R_a` in the coordinate frame.
    pub fn right_frame(&self) -> &[PolyVectorField] {
        &self.right
    }

    /// Left coframe as a matrix: `σ_a = Σ_b C[a][b] dx_b`.
    pub fn left_coframe_matrix(&self) -> &[Vec<Polynomial>] {
        &self.left_coframe
    }

    /// Right coframe as a matrix, dual to [`right_frame`](Self::right_frame).
    pub fn right_coframe_matrix(&self) -> &[Vec<Polynomial>] {
        &self.right_coframe
    }

    /// Coefficients `z_a` of `Z = Σ z_a X_a`.
    pub fn left_coefficients(&self, z: &PolyVectorField) -> Result<Vec<Polynomial>> {
        z.check_dim(self.dim())?;
        Ok(self
            .left_coframe
            .iter()
            .map(|row| {
                let mut acc = Polynomial::zero();
                for (c, zb) in row.iter().zip(&z.components) {
                    if !c.is_zero() && !zb.is_zero() {
                        acc += &(c * zb);
                    }
                }
                acc
            })
            .collect())
    }

    /// `Σ z_a X_a` in the coordinate frame.
    pub fn from_left_coefficients(&self, z: &[Polynomial]) -> Result<PolyVectorField> {
        self.check_point(z.len())?;
        Ok(PolyVectorField::combination(&self.left, z))
    }

    pub fn left_frame_compiled(&self) -> &[CompiledField] {
        &self.left_compiled
    }

    /// Generator `Σ_a l_a x_a ∂_a` of the dilations `δ_{e^t}`.
    pub fn dilation_generator(&self) -> PolyVectorField {
        PolyVectorField::new(
            self.weights.iter().enumerate().map(|(a, &w)| Polynomial::var(a).scale(&q_int(w as i64))).collect(),
        )
    }

    /// `F[c][a]`: component `c` of `X_a` at `x`.
    pub fn left_frame_matrix_f64(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut m = vec![vec![0.0; n]; n];
        for (a, f) in self.left_compiled.iter().enumerate() {
            for (c, p) in f.components.iter().enumerate() {
                m[c][a] = p.eval(x);
            }
        }
        m
    }

    /// `C[a][b]` with `σ_a = Σ_b C[a][b] dx_b` at `x`.
    pub fn left_coframe_matrix_f64(&self, x: &[f64]) -> Vec<Vec<f64>> {
        self.left_coframe_compiled
            .iter()
            .map(|r| r.iter().map(|p| p.eval(x)).collect())
            .collect()
    }

    /// Left-frame coefficients of a coordinate vector at `x`.
    pub fn to_left_coefficients_f64(&self, x: &[f64], v: &[f64]) -> Vec<f64> {
        self.left_coframe_compiled
            .iter()
            .map(|r| r.iter().zip(v).map(|(p, vb)| if *vb == 0.0 { 0.0 } else { p.eval(x) * vb }).sum())
            .collect()
    }

    /// Homogeneous gauge `N(x) = Σ |x_a|^{2 s!/l_a}`; its `1/(2 s!)` power is 1-homogeneous.
    pub fn gauge(&self, x: &[f64]) -> f64 {
        let sf = factorial(self.step()) as i32;
        let big = x
            .iter()
            .zip(&self.weights)
            .map(|(c, &w)| c.abs().powi(2 * sf / w as i32))
            .sum::<f64>();
        big.powf(1.0 / (2 * sf) as f64)
    }
}

pub(crate) fn factorial(k: usize) -> usize {
    (1..=k).product()
}

/// Substitutes `y → −y` in parameter variables `n..2n`.
fn negate_params(p: &[Polynomial], n: usize) -> Vec<Polynomial> {
    let subs: Vec<Polynomial> = (0..2 * n)
        .map(|v| if v < n { Polynomial::var(v) } else { Polynomial::var(v).scale(&q_int(-1)) })
        .collect();
    p.iter().map(|q| q.compose(&subs)).collect()
}

/// `F[c][a]` = component `c` of frame field `a`.
fn frame_matrix(frame: &[PolyVectorField]) -> Vec<Vec<Polynomial>> {
    let n = frame.len();
    (0..n).map(|c| (0..n).map(|a| frame[a].components[c].clone()).collect()).collect()
}

pub(crate) fn mat_mul(a: &[Vec<Polynomial>], b: &[Vec<Polynomial>]) -> Vec<Vec<Polynomial>> {
    let n = a.len();
    let m = b[0].len();
    let mut out = vec![vec![Polynomial::zero(); m]; n];
    for i in 0..n {
        for (k, aik) in a[i].iter().enumerate() {
            if aik.is_zero() {
                continue;
            }
            for j in 0..m {
                if !b[k][j].is_zero() {
                    out[i][j] += &(aik * &b[k][j]);
                }
            }
        }
    }
    out
}

/// Inverse of `I + N` with `N` nilpotent of order `≤ s`: `Σ_k (−N)^k`.
fn invert_unipotent(f: &[Vec<Polynomial>], s: usize) -> Vec<Vec<Polynomial>> {
    let n = f.len();
    let mut neg_n: Vec<Vec<Polynomial>> = f.to_vec();
    for (i, row) in neg_n.iter_mut().enumerate() {
        row[i] -= &Polynomial::constant(q_int(1));
        for p in row.iter_mut() {
            *p = Ring::neg(p);
        }
    }
    let mut out: Vec<Vec<Polynomial>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Polynomial::constant(q_int(1)) } else { Polynomial::zero() }).collect())
        .collect();
    let mut power = out.clone();
    for _ in 1..=s {
        power = mat_mul(&power, &neg_n);
        if power.iter().all(|r| r.iter().all(Polynomial::is_zero)) {
            break;
        }
        for i in 0..n {
            for j in 0..n {
                out[i][j] += &power[i][j];
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_polynomial;
    use crate::rational::q_frac;

    fn p(s: &str) -> Polynomial {
        parse_polynomial(s).unwrap()
    }

    fn field(parts: &[&str]) -> PolyVectorField {
        PolyVectorField::new(parts.iter().map(|s| p(s)).collect())
    }

    #[test]
    fn heisenberg_product() {
        let g = CarnotGroup::builtin("heisenberg").unwrap();
        let x = vec![q_int(1), q_int(0), q_int(0)];
        let y = vec![q_int(0), q_int(1), q_int(0)];
        assert_eq!(g.product(&x, &y).unwrap(), vec![q_int(1), q_int(1), q_frac(1, 2)]);
        assert_eq!(g.product(&x, &g.inverse(&x)).unwrap(), vec![q_int(0); 3]);
    }

    #[test]
    fn heisenberg_frames_and_coframe() {
        let g = CarnotGroup::builtin("heisenberg").unwrap();
        assert_eq!(g.left_frame()[0], field(&["1", "0", "-1/2*x2"]));
        assert_eq!(g.left_frame()[1], field(&["0", "1", "1/2*x1"]));
        assert_eq!(g.left_frame()[2], field(&["0", "0", "1"]));
        let c = g.left_coframe_matrix();
        assert_eq!(c[2], vec![p("1/2*x2"), p("-1/2*x1"), p("1")]);
    }

    #[test]
    fn heisenberg_left_translation() {
        let g = CarnotGroup::builtin("heisenberg").unwrap();
        let a = vec![q_int(2), q_int(3), q_int(5)];
        let l = g.left_translation(&a).unwrap();
        assert_eq!(l.components[2], p("x3 + 5 + x2 - 3/2*x1"));
    }

    #[test]
    fn invalid_algebra_rejected() {
        let mut a = StratifiedLieAlgebra::new("broken", vec![2, 1, 1]).unwrap();
        a.set_bracket(0, 1, &crate::algebra::AlgebraVector::basis(4, 2).0).unwrap();
        assert!(matches!(CarnotGroup::new(a), Err(CarnotError::InvalidAlgebra(_))));
    }
}
