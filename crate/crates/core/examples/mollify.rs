//! Group mollification of polynomial and continuous forms.

use carnot::exterior::{DxToSigma, FormBasis, PolyForm};
use carnot::group::CarnotGroup;
use carnot::mollifier::{BumpForm, ContinuousForm, Mollifier};
use carnot::bump::TestBump;
use carnot::poly::parse_polynomial;
use carnot::quadrature::TensorGrid;

fn main() -> carnot::error::Result<()> {
    let g = CarnotGroup::builtin("heisenberg")?;
    let m = Mollifier::new(&g, 0.5)?;
    println!("mass of rho_eps: {:.12}", m.total_mass(1.0 / 12.0));

    let f = parse_polynomial("x1^2*x3 - x2")?;
    println!("f^eps = {}", m.smooth_poly(&f));

    // Duality: the mollified form against beta equals the form against the
    // reflected mollification of beta.
    let theta = PolyForm::monomial(3, &[0], f.clone(), FormBasis::Coordinate);
    let beta = BumpForm::new(&g, TestBump::new(vec![0.1, 0.0, -0.1], 0.4)?, &g.sigma(&[1, 2]))?;
    let dual = m.verify_duality(&theta, &beta)?;
    println!("duality: lhs {:.12} rhs {:.12}", dual.lhs, dual.rhs);

    let rough = ContinuousForm::new(3, 1).with(&[0], |x| x[0].abs());
    let grid = TensorGrid::gauss_box(&[-0.5; 3], &[0.5; 3], 7);
    for eps in [0.4, 0.2, 0.1] {
        let l1 = Mollifier::new(&g, eps)?.with_order(6).l1_error(&rough, &grid);
        println!("eps {eps}: L1 error {l1:.3e}");
    }
    Ok(())
}
