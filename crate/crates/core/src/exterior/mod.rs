//! Alternating forms with coefficients in any [`Ring`].
//!
//! A `k`-form on an `n`-dimensional space is stored as a map from `k`-subsets
//! of `0..n` (bitmasks, increasing indices) to coefficients. The same type
//! carries forms in the coordinate coframe `dx` and in the left-invariant
//! coframe `σ`; the [`FormBasis`] tag records which one, and operations that
//! only make sense in one of them check it.

mod poly_ops;
mod sampled;
mod weight;

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{CarnotError, Result};
use crate::poly::Polynomial;
use crate::rational::{Ring, Q};

pub use poly_ops::{change_basis, d_left_invariant, maurer_cartan, DxToSigma};
pub use sampled::{default_grid_order, Interpolator, SampledForm, SampledFunction, SampledVectorField};
pub use weight::{is_vertical, verify_weight_bound, weight_of, Weight};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FormBasis {
    /// `dx_{i1} ∧ … ∧ dx_{ik}`.
    Coordinate,
    /// `σ_{i1} ∧ … ∧ σ_{ik}`.
    LeftInvariant,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Form<R: Ring> {
    n: usize,
    degree: usize,
    basis: FormBasis,
    comps: BTreeMap<u64, R>,
}

pub type PolyForm = Form<Polynomial>;
pub type ConstForm = Form<Q>;
pub type NumForm = Form<f64>;

/// Indices of the set bits of `mask`, ascending.
pub fn bits(mask: u64) -> impl Iterator<Item = usize> {
    let mut m = mask;
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(i)
        }
    })
}

/// Sign of the permutation sorting the concatenation `a ++ b` of two
/// disjoint increasing index sets.
pub fn wedge_sign(a: u64, b: u64) -> i64 {
    let mut inversions = 0u32;
    for j in bits(b) {
        inversions += (a >> (j + 1)).count_ones();
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Sorts an index list into a mask; `None` if an index repeats.
pub fn mask_of(indices: &[usize]) -> Option<(i64, u64)> {
    let mut sign = 1i64;
    let mut mask = 0u64;
    for &i in indices {
        if mask & (1 << i) != 0 {
            return None;
        }
        if (mask >> (i + 1)).count_ones() % 2 == 1 {
            sign = -sign;
        }
        mask |= 1 << i;
    }
    Some((sign, mask))
}

impl<R: Ring> Form<R> {
    pub fn zero(n: usize, degree: usize, basis: FormBasis) -> Self {
        Form { n, degree, basis, comps: BTreeMap::new() }
    }

    /// `c · e_{i1} ∧ … ∧ e_{ik}` for an arbitrary index order.
    pub fn monomial(n: usize, indices: &[usize], c: R, basis: FormBasis) -> Self {
        let mut f = Self::zero(n, indices.len(), basis);
        if let Some((sign, mask)) = mask_of(indices) {
            let c = if sign < 0 { c.neg() } else { c };
            f.set(mask, c);
        }
        f
    }

    /// The one-form `Σ_i c_i e_i`.
    pub fn one_form(coeffs: Vec<R>, basis: FormBasis) -> Self {
        let n = coeffs.len();
        let mut f = Self::zero(n, 1, basis);
        for (i, c) in coeffs.into_iter().enumerate() {
            f.set(1 << i, c);
        }
        f
    }

    /// `e_1 ∧ … ∧ e_n`.
    pub fn volume(n: usize, basis: FormBasis) -> Self {
        let mut f = Self::zero(n, n, basis);
        f.set(full_mask(n), R::one());
        f
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn basis(&self) -> FormBasis {
        self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn components(&self) -> impl Iterator<Item = (u64, &R)> {
        self.comps.iter().map(|(m, c)| (*m, c))
    }

    pub fn component(&self, mask: u64) -> R {
        self.comps.get(&mask).cloned().unwrap_or_else(R::zero)
    }

    /// Coefficient of `e_1 ∧ … ∧ e_n` (zero unless the form is top degree).
    pub fn top_coefficient(&self) -> R {
        if self.degree != self.n {
            return R::zero();
        }
        self.component(full_mask(self.n))
    }

    pub fn set(&mut self, mask: u64, c: R) {
        debug_assert_eq!(mask.count_ones() as usize, self.degree);
        if c.is_zero() {
            self.comps.remove(&mask);
        } else {
            self.comps.insert(mask, c);
        }
    }

    pub fn add_to(&mut self, mask: u64, c: &R) {
        if c.is_zero() {
            return;
        }
        let v = self.component(mask).add(c);
        self.set(mask, v);
    }

    fn check_compatible(&self, other: &Self) {
        assert_eq!(self.n, other.n, "forms on different spaces");
        assert_eq!(self.basis, other.basis, "forms in different coframes");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_compatible(other);
        assert_eq!(self.degree, other.degree, "adding forms of different degree");
        let mut out = self.clone();
        for (m, c) in &other.comps {
            out.add_to(*m, c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map(|c| c.neg())
    }

    pub fn scale(&self, s: &R) -> Self {
        self.map(|c| c.mul(s))
    }

    /// Applies `f` to every coefficient (zeros are dropped).
    pub fn map(&self, f: impl Fn(&R) -> R) -> Self {
        let mut out = Self::zero(self.n, self.degree, self.basis);
        for (m, c) in &self.comps {
            out.set(*m, f(c));
        }
        out
    }

    /// Changes the coefficient ring.
    pub fn map_ring<S: Ring>(&self, f: impl Fn(&R) -> S) -> Form<S> {
        let mut out = Form::zero(self.n, self.degree, self.basis);
        for (m, c) in &self.comps {
            out.set(*m, f(c));
        }
        out
    }

    /// Relabels the coframe without touching coefficients.
    pub fn with_basis(mut self, basis: FormBasis) -> Self {
        self.basis = basis;
        self
    }

    /// `α ∧ β`; degrees beyond `n` give the zero form of degree `n`.
    pub fn wedge(&self, other: &Self) -> Self {
        self.check_compatible(other);
        let degree = (self.degree + other.degree).min(self.n);
        let mut out = Self::zero(self.n, degree, self.basis);
        if self.degree + other.degree > self.n {
            return out;
        }
        for (ma, ca) in &self.comps {
            for (mb, cb) in &other.comps {
                if ma & mb != 0 {
                    continue;
                }
                let c = ca.mul(cb);
                let c = if wedge_sign(*ma, *mb) < 0 { c.neg() } else { c };
                out.add_to(ma | mb, &c);
            }
        }
        out
    }

    /// `i_v ω` for a vector given by its components in the frame dual to
    /// this form's coframe. A 0-form gives the zero 0-form.
    pub fn interior(&self, v: &[R]) -> Self {
        assert_eq!(v.len(), self.n, "vector has wrong dimension");
        if self.degree == 0 {
            return Self::zero(self.n, 0, self.basis);
        }
        let mut out = Self::zero(self.n, self.degree - 1, self.basis);
        for (m, c) in &self.comps {
            for (pos, i) in bits(*m).enumerate() {
                if v[i].is_zero() {
                    continue;
                }
                let t = c.mul(&v[i]);
                let t = if pos % 2 == 1 { t.neg() } else { t };
                out.add_to(m & !(1 << i), &t);
            }
        }
        out
    }

    /// Evaluates the form on `k` vectors (components in the dual frame).
    pub fn evaluate_on(&self, vectors: &[Vec<R>]) -> R {
        assert_eq!(vectors.len(), self.degree);
        let mut f = self.clone();
        for v in vectors {
            f = f.interior(v);
        }
        f.component(0)
    }
}

pub fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl PolyForm {
    /// Pointwise value at a floating-point point.
    pub fn eval_f64(&self, x: &[f64]) -> NumForm {
        self.map_ring(|p| p.eval_f64(x))
    }

    pub fn eval(&self, x: &[Q]) -> ConstForm {
        self.map_ring(|p| p.eval(x))
    }
}

impl ConstForm {
    pub fn to_poly(&self) -> PolyForm {
        self.map_ring(|c| Polynomial::constant(c.clone()))
    }

    pub fn to_f64(&self) -> NumForm {
        self.map_ring(crate::rational::q_to_f64)
    }
}

impl NumForm {
    pub fn max_abs(&self) -> f64 {
        self.comps.values().fold(0.0, |m, c| m.max(c.abs()))
    }
}

fn symbol(basis: FormBasis, i: usize) -> String {
    match basis {
        FormBasis::Coordinate => format!("dx{}", i + 1),
        FormBasis::LeftInvariant => format!("σ{}", i + 1),
    }
}

/// Name of the basis element for `mask`, e.g. `dx1∧dx3`.
pub fn basis_name(basis: FormBasis, mask: u64) -> String {
    if mask == 0 {
        return "1".into();
    }
    bits(mask).map(|i| symbol(basis, i)).collect::<Vec<_>>().join("∧")
}

impl fmt::Display for PolyForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .comps
            .iter()
            .map(|(m, c)| {
                let name = basis_name(self.basis, *m);
                let s = c.to_string();
                if s == "1" {
                    name
                } else if c.num_terms() == 1 {
                    format!("{s}*{name}")
                } else {
                    format!("({s})*{name}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + ").replace("+ -", "- "))
    }
}

/// Checks that two forms live on the same space and coframe.
pub fn ensure_same<R: Ring>(a: &Form<R>, b: &Form<R>) -> Result<()> {
    if a.n != b.n {
        return Err(CarnotError::DimensionMismatch { expected: a.n, got: b.n });
    }
    if a.basis != b.basis {
        return Err(CarnotError::InvalidAlgebra("forms expressed in different coframes".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q_int;

    fn c(v: i64) -> Q {
        q_int(v)
    }

    #[test]
    fn mask_signs() {
        assert_eq!(mask_of(&[0, 1]), Some((1, 0b11)));
        assert_eq!(mask_of(&[1, 0]), Some((-1, 0b11)));
        assert_eq!(mask_of(&[2, 0, 1]), Some((1, 0b111)));
        assert_eq!(mask_of(&[1, 1]), None);
        assert_eq!(wedge_sign(0b10, 0b01), -1);
        assert_eq!(wedge_sign(0b100, 0b011), 1);
    }

    #[test]
    fn interior_of_wedge_of_duals() {
        let s1 = ConstForm::monomial(3, &[0], c(1), FormBasis::LeftInvariant);
        let s2 = ConstForm::monomial(3, &[1], c(1), FormBasis::LeftInvariant);
        let x1 = vec![c(1), c(0), c(0)];
        assert_eq!(s1.wedge(&s2).interior(&x1), s2);
        let x2 = vec![c(0), c(1), c(0)];
        assert_eq!(s1.wedge(&s2).interior(&x2), s1.neg());
    }

    #[test]
    fn overflow_gives_zero() {
        let v = ConstForm::volume(3, FormBasis::Coordinate);
        let s1 = ConstForm::monomial(3, &[0], c(1), FormBasis::Coordinate);
        let w = v.wedge(&s1);
        assert!(w.is_zero());
        assert_eq!(w.degree(), 3);
    }

    #[test]
    fn evaluation_is_determinant() {
        let f = ConstForm::monomial(2, &[0, 1], c(1), FormBasis::Coordinate);
        let det = f.evaluate_on(&[vec![c(1), c(2)], vec![c(3), c(4)]]);
        // i_v1 first, then i_v2: ω(v1, v2) = 1·4 − 2·3
        assert_eq!(det, c(-2));
    }
}
