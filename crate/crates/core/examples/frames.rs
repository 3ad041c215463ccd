//! Left- and right-invariant frames and the left coframe.

use carnot::exterior::DxToSigma;
use carnot::group::CarnotGroup;

fn main() -> carnot::error::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "heisenberg".into());
    let g = CarnotGroup::builtin(&name)?;
    let alg = g.algebra();
    let w = g.weights();
    for (a, (x, xr)) in g.left_frame().iter().zip(g.right_frame()).enumerate() {
        println!("X{}  = {}", alg.basis_index(a), x.fmt_with(w));
        println!("XR{} = {}", alg.basis_index(a), xr.fmt_with(w));
    }
    for a in 0..g.dim() {
        println!("sigma{} = {}", alg.basis_index(a), g.to_coordinate(&g.sigma(&[a]))?);
    }
    Ok(())
}
