//! Exterior calculus on the Engel group: d in both coframes, weights and
//! verticality.

use carnot::exterior::{is_vertical, maurer_cartan, weight_of, DxToSigma};
use carnot::group::CarnotGroup;

fn main() -> carnot::error::Result<()> {
    let g = CarnotGroup::builtin("engel")?;
    let n = g.dim();

    // d sigma_t from the structure constants and from coordinates.
    for t in 0..n {
        let s = g.sigma(&[t]);
        let by_constants = maurer_cartan(g.algebra(), t).to_poly();
        let by_coords = g.to_left_invariant(&g.to_coordinate(&s)?.d()?)?;
        println!("d sigma{} = {by_constants}  (coordinates agree: {})", t + 1, by_constants == by_coords);
    }

    let beta = g.sigma_hat(0);
    println!("weight of sigmahat1: {}", weight_of(&g, &beta)?);
    println!("sigma4 vertical: {}", is_vertical(&g, &g.sigma(&[3]))?);
    println!("sigma4 ^ sigmahat1 = {}", g.sigma(&[3]).wedge(&beta));
    Ok(())
}
