//! Exterior derivative, Lie derivative, pullback and change of coframe for
//! forms with polynomial coefficients.

use crate::algebra::StratifiedLieAlgebra;
use crate::error::{CarnotError, Result};
use crate::group::{CarnotGroup, PolyMap, PolyVectorField};
use crate::poly::Polynomial;
use crate::rational::Ring;

use super::{bits, ConstForm, Form, FormBasis, PolyForm};

impl PolyForm {
    fn require(&self, basis: FormBasis) -> Result<()> {
        if self.basis != basis {
            return Err(CarnotError::InvalidAlgebra(format!(
                "operation needs a form in the {basis:?} coframe, got {:?}",
                self.basis
            )));
        }
        Ok(())
    }

    /// Coordinate exterior derivative `d(f dx_I) = Σ_j ∂_j f dx_j ∧ dx_I`.
    pub fn d(&self) -> Result<PolyForm> {
        self.require(FormBasis::Coordinate)?;
        let mut out = PolyForm::zero(self.n, (self.degree + 1).min(self.n), self.basis);
        if self.degree == self.n {
            return Ok(out);
        }
        for (m, c) in &self.comps {
            for j in 0..self.n {
                if m & (1 << j) != 0 {
                    continue;
                }
                let dj = c.deriv(j);
                if dj.is_zero() {
                    continue;
                }
                // dx_j ∧ dx_I: sign from the indices of I below j.
                let below = (m & ((1u64 << j) - 1)).count_ones();
                let t = if below % 2 == 1 { dj.neg() } else { dj };
                out.add_to(m | (1 << j), &t);
            }
        }
        Ok(out)
    }

    /// `L_X ω` from the derivation rule on components:
    /// `L_X(f dx_I) = X(f) dx_I + f Σ_p dx_{i1} ∧ … ∧ d(X_{ip}) ∧ … ∧ dx_{ik}`.
    pub fn lie_derivative(&self, x: &PolyVectorField) -> Result<PolyForm> {
        self.require(FormBasis::Coordinate)?;
        x.check_dim(self.n)?;
        let mut out = PolyForm::zero(self.n, self.degree, self.basis);
        for (m, c) in &self.comps {
            out.add_to(*m, &x.apply(c));
            let idx: Vec<usize> = bits(*m).collect();
            for (p, &i) in idx.iter().enumerate() {
                for j in 0..self.n {
                    let dxi = x.components[i].deriv(j);
                    if dxi.is_zero() {
                        continue;
                    }
                    let mut new_idx = idx.clone();
                    new_idx[p] = j;
                    if let Some((sign, mask)) = super::mask_of(&new_idx) {
                        let t = c.mul(&dxi);
                        out.add_to(mask, &if sign < 0 { t.neg() } else { t });
                    }
                }
            }
        }
        Ok(out)
    }

    /// `F^*ω = Σ_I ω_I(F) dF_{i1} ∧ … ∧ dF_{ik}`.
    pub fn pullback(&self, f: &PolyMap) -> Result<PolyForm> {
        self.require(FormBasis::Coordinate)?;
        if f.dim() != self.n {
            return Err(CarnotError::DimensionMismatch { expected: self.n, got: f.dim() });
        }
        let jac = f.jacobian();
        let differentials: Vec<PolyForm> =
            jac.iter().map(|row| PolyForm::one_form(row.clone(), FormBasis::Coordinate)).collect();
        let mut out = PolyForm::zero(self.n, self.degree, self.basis);
        for (m, c) in &self.comps {
            let mut term = PolyForm::zero(self.n, 0, self.basis);
            term.set(0, c.compose(&f.components));
            for i in bits(*m) {
                term = term.wedge(&differentials[i]);
            }
            out = out.add(&term);
        }
        Ok(out)
    }
}

/// Re-expresses `ω` when each old basis one-form is `e_i = Σ_j m[i][j] f_j`.
pub fn change_basis<R: Ring>(omega: &Form<R>, m: &[Vec<R>], new_basis: FormBasis) -> Form<R> {
    let n = omega.n;
    let ones: Vec<Form<R>> = m.iter().map(|row| Form::one_form(row.clone(), new_basis)).collect();
    let mut out = Form::zero(n, omega.degree, new_basis);
    for (mask, c) in &omega.comps {
        let mut term = Form::zero(n, 0, new_basis);
        term.set(0, c.clone());
        for i in bits(*mask) {
            term = term.wedge(&ones[i]);
        }
        out = out.add(&term);
    }
    out
}

/// `dσ_k = −Σ_{a<b} c^k_{ab} σ_a ∧ σ_b`.
pub fn maurer_cartan(alg: &StratifiedLieAlgebra, k: usize) -> ConstForm {
    let n = alg.dim();
    let mut out = ConstForm::zero(n, 2, FormBasis::LeftInvariant);
    for (&(a, b), targets) in alg.nonzero_brackets() {
        for (t, c) in targets {
            if *t == k {
                out.add_to((1 << a) | (1 << b), &(-c.clone()));
            }
        }
    }
    out
}

/// Exterior derivative of a constant-coefficient form in the left-invariant
/// coframe, by the Leibniz rule and the structure equations.
pub fn d_left_invariant(alg: &StratifiedLieAlgebra, omega: &ConstForm) -> ConstForm {
    let n = alg.dim();
    assert_eq!(omega.basis, FormBasis::LeftInvariant);
    let mut out = ConstForm::zero(n, (omega.degree + 1).min(n), FormBasis::LeftInvariant);
    if omega.degree == n {
        return out;
    }
    let mc: Vec<ConstForm> = (0..n).map(|k| maurer_cartan(alg, k)).collect();
    for (mask, c) in &omega.comps {
        let idx: Vec<usize> = bits(*mask).collect();
        for p in 0..idx.len() {
            if mc[idx[p]].is_zero() {
                continue;
            }
            let mut term = ConstForm::zero(n, 0, FormBasis::LeftInvariant);
            term.set(0, if p % 2 == 1 { -c.clone() } else { c.clone() });
            for (q, &i) in idx.iter().enumerate() {
                let factor = if q == p {
                    mc[i].clone()
                } else {
                    ConstForm::monomial(n, &[i], crate::rational::q_int(1), FormBasis::LeftInvariant)
                };
                term = term.wedge(&factor);
            }
            out = out.add(&term);
        }
    }
    out
}

/// Helpers tying forms to a group's frames.
pub trait DxToSigma {
    /// `F[b][a]` with `dx_b = Σ_a F[b][a] σ_a`.
    fn frame_matrix(&self) -> Vec<Vec<Polynomial>>;
    fn to_left_invariant(&self, omega: &PolyForm) -> Result<PolyForm>;
    fn to_coordinate(&self, omega: &PolyForm) -> Result<PolyForm>;
    /// `d` computed in the σ coframe: `d(f σ_I) = Σ_a X_a(f) σ_a ∧ σ_I + f dσ_I`.
    fn d_left(&self, omega: &PolyForm) -> Result<PolyForm>;
    /// `i_Z ω` for a coordinate field `Z` and a form in either coframe.
    fn interior_field(&self, z: &PolyVectorField, omega: &PolyForm) -> Result<PolyForm>;
    /// `σ_I` for a sorted index list.
    fn sigma(&self, indices: &[usize]) -> PolyForm;
    /// `σ̂_a = ⋀_{b ≠ a} σ_b`.
    fn sigma_hat(&self, a: usize) -> PolyForm;
}

impl DxToSigma for CarnotGroup {
    fn frame_matrix(&self) -> Vec<Vec<Polynomial>> {
        let n = self.dim();
        (0..n).map(|b| (0..n).map(|a| self.left_frame()[a].components[b].clone()).collect()).collect()
    }

    fn to_left_invariant(&self, omega: &PolyForm) -> Result<PolyForm> {
        omega.require(FormBasis::Coordinate)?;
        Ok(change_basis(omega, &self.frame_matrix(), FormBasis::LeftInvariant))
    }

    fn to_coordinate(&self, omega: &PolyForm) -> Result<PolyForm> {
        omega.require(FormBasis::LeftInvariant)?;
        Ok(change_basis(omega, self.left_coframe_matrix(), FormBasis::Coordinate))
    }

    fn d_left(&self, omega: &PolyForm) -> Result<PolyForm> {
        omega.require(FormBasis::LeftInvariant)?;
        let n = self.dim();
        let mut out = PolyForm::zero(n, (omega.degree + 1).min(n), FormBasis::LeftInvariant);
        if omega.degree == n {
            return Ok(out);
        }
        for (mask, c) in &omega.comps {
            let basis_form = ConstForm::zero(n, omega.degree, FormBasis::LeftInvariant);
            let mut unit = basis_form;
            unit.set(*mask, crate::rational::q_int(1));
            let d_sigma = d_left_invariant(self.algebra(), &unit).to_poly();
            out = out.add(&d_sigma.scale(c));
            for (a, xa) in self.left_frame().iter().enumerate() {
                if mask & (1 << a) != 0 {
                    continue;
                }
                let g = xa.apply(c);
                if g.is_zero() {
                    continue;
                }
                let below = (mask & ((1u64 << a) - 1)).count_ones();
                out.add_to(mask | (1 << a), &if below % 2 == 1 { g.neg() } else { g });
            }
        }
        Ok(out)
    }

    fn interior_field(&self, z: &PolyVectorField, omega: &PolyForm) -> Result<PolyForm> {
        z.check_dim(self.dim())?;
        match omega.basis {
            FormBasis::Coordinate => Ok(omega.interior(&z.components)),
            FormBasis::LeftInvariant => Ok(omega.interior(&self.left_coefficients(z)?)),
        }
    }

    fn sigma(&self, indices: &[usize]) -> PolyForm {
        PolyForm::monomial(self.dim(), indices, Polynomial::constant(crate::rational::q_int(1)), FormBasis::LeftInvariant)
    }

    fn sigma_hat(&self, a: usize) -> PolyForm {
        let idx: Vec<usize> = (0..self.dim()).filter(|&b| b != a).collect();
        self.sigma(&idx)
    }
}

impl ConstForm {
    /// Constant σ-form as a form with constant polynomial coefficients.
    pub fn scaled_poly(&self, p: &Polynomial) -> PolyForm {
        self.map_ring(|c| p.scale(c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_polynomial;
    use crate::rational::q_int;

    fn p(s: &str) -> Polynomial {
        parse_polynomial(s).unwrap()
    }

    #[test]
    fn heisenberg_d_sigma3() {
        let g = CarnotGroup::builtin("heisenberg").unwrap();
        let s3 = g.to_coordinate(&g.sigma(&[2])).unwrap();
        let d = s3.d().unwrap();
        let want = PolyForm::monomial(3, &[0, 1], p("-1"), FormBasis::Coordinate);
        assert_eq!(d, want);
        assert_eq!(g.to_left_invariant(&d).unwrap(), g.sigma(&[0, 1]).neg());
        assert_eq!(maurer_cartan(g.algebra(), 2).to_poly(), g.sigma(&[0, 1]).neg());
    }

    #[test]
    fn d_squared_and_routes_agree_on_engel() {
        let g = CarnotGroup::builtin("engel").unwrap();
        let w = PolyForm::one_form(vec![p("x2*x3"), p("x1^2"), p("x4 - x1*x2"), p("x3")], FormBasis::Coordinate);
        let dw = w.d().unwrap();
        assert!(dw.d().unwrap().is_zero());
        let sigma_route = g.d_left(&g.to_left_invariant(&w).unwrap()).unwrap();
        assert_eq!(g.to_coordinate(&sigma_route).unwrap(), dw);
    }

    #[test]
    fn cartan_formula() {
        let x = PolyVectorField::new(vec![p("x2"), p("x1*x3"), p("1 + x1^2")]);
        let w = PolyForm::monomial(3, &[0, 2], p("x1*x2 - x3"), FormBasis::Coordinate);
        let lhs = w.lie_derivative(&x).unwrap();
        let rhs = w.d().unwrap().interior(&x.components).add(&w.interior(&x.components).d().unwrap());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn pullback_commutes_with_d() {
        let f = PolyMap::new(vec![p("x1 + x2^2"), p("x2"), p("x3 + x1*x2")]);
        let w = PolyForm::one_form(vec![p("x3"), p("x1*x2"), p("x2^2")], FormBasis::Coordinate);
        assert_eq!(w.pullback(&f).unwrap().d().unwrap(), w.d().unwrap().pullback(&f).unwrap());
    }

    #[test]
    fn dilation_scales_sigma_monomials() {
        let g = CarnotGroup::builtin("g235").unwrap();
        let t = q_int(3);
        let dil = g.dilation(&t).unwrap();
        for idx in [vec![0], vec![2], vec![1, 4], vec![0, 2, 3]] {
            let s = g.to_coordinate(&g.sigma(&idx)).unwrap();
            let w: u32 = idx.iter().map(|&i| g.weights()[i]).sum();
            let scaled = s.scale(&Polynomial::constant(num_traits::pow(t.clone(), w as usize)));
            assert_eq!(s.pullback(&dil).unwrap(), scaled);
        }
    }
}
