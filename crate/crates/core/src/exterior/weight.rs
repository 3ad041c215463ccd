//! Weights and verticality in the left-invariant coframe.

use std::fmt;

use crate::error::{CarnotError, Result};
use crate::group::CarnotGroup;

use super::{bits, DxToSigma, FormBasis, PolyForm};

/// Weight of a form: `σ_(l,v)` has weight `−l` and weights add under wedge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Weight {
    Homogeneous(i32),
    Mixed,
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Homogeneous(w) => write!(f, "{w}"),
            Weight::Mixed => write!(f, "mixed"),
        }
    }
}

/// Weight of the coframe monomial `σ_I`.
pub fn mask_weight(weights: &[u32], mask: u64) -> i32 {
    -(bits(mask).map(|i| weights[i] as i32).sum::<i32>())
}

fn in_sigma(group: &CarnotGroup, omega: &PolyForm) -> Result<PolyForm> {
    match omega.basis() {
        FormBasis::LeftInvariant => Ok(omega.clone()),
        FormBasis::Coordinate => group.to_left_invariant(omega),
    }
}

/// Common weight of the σ-components of `ω`, or [`Weight::Mixed`].
/// Coordinate-coframe forms are converted first.
pub fn weight_of(group: &CarnotGroup, omega: &PolyForm) -> Result<Weight> {
    let s = in_sigma(group, omega)?;
    let mut found: Option<i32> = None;
    for (mask, _) in s.components() {
        let w = mask_weight(group.weights(), mask);
        match found {
            None => found = Some(w),
            Some(v) if v != w => return Ok(Weight::Mixed),
            _ => {}
        }
    }
    found.map(Weight::Homogeneous).ok_or(CarnotError::ZeroForm)
}

/// `η(X_(1,j)) = 0` for every horizontal frame field.
pub fn is_vertical(group: &CarnotGroup, eta: &PolyForm) -> Result<bool> {
    if eta.degree() != 1 {
        return Err(CarnotError::DimensionMismatch { expected: 1, got: eta.degree() });
    }
    let s = in_sigma(group, eta)?;
    let d1 = group.algebra().strata()[0];
    Ok((0..d1).all(|j| s.component(1 << j).is_zero()))
}

/// `−ν ≤ wt(ω) ≤ −k`, checked on every component of a mixed form.
pub fn verify_weight_bound(group: &CarnotGroup, omega: &PolyForm) -> Result<bool> {
    let s = in_sigma(group, omega)?;
    if s.is_zero() {
        return Err(CarnotError::ZeroForm);
    }
    let nu = group.homogeneous_dimension() as i32;
    let k = s.degree() as i32;
    let ok = s.components().all(|(mask, _)| {
        let w = mask_weight(group.weights(), mask);
        -nu <= w && w <= -k
    });
    Ok(ok)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Polynomial;
    use crate::rational::q_int;

    #[test]
    fn heisenberg_weights() {
        let g = CarnotGroup::builtin("heisenberg").unwrap();
        assert_eq!(weight_of(&g, &g.sigma(&[0])).unwrap(), Weight::Homogeneous(-1));
        assert_eq!(weight_of(&g, &g.sigma(&[0, 2])).unwrap(), Weight::Homogeneous(-3));
        assert_eq!(weight_of(&g, &g.sigma(&[0, 1, 2])).unwrap(), Weight::Homogeneous(-4));
        let mixed = g.sigma(&[0]).add(&g.sigma(&[2]));
        assert_eq!(weight_of(&g, &mixed).unwrap(), Weight::Mixed);
        let zero = PolyForm::zero(3, 1, FormBasis::LeftInvariant);
        assert!(matches!(weight_of(&g, &zero), Err(CarnotError::ZeroForm)));
    }

    #[test]
    fn dx3_is_not_vertical_but_sigma3_is() {
        let g = CarnotGroup::builtin("heisenberg").unwrap();
        let dx3 = PolyForm::monomial(3, &[2], Polynomial::constant(q_int(1)), FormBasis::Coordinate);
        // dx3 = σ3 − (x2/2)σ1 + (x1/2)σ2
        assert!(!is_vertical(&g, &dx3).unwrap());
        assert!(is_vertical(&g, &g.sigma(&[2])).unwrap());
        assert!(is_vertical(&g, &g.to_coordinate(&g.sigma(&[2])).unwrap()).unwrap());
    }
}
