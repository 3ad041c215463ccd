//! Polynomial contact vector fields and the stabilization probe.

use carnot::contact::{is_contact, rigidity_probe, solve_contact_fields};
use carnot::group::CarnotGroup;

fn main() -> carnot::error::Result<()> {
    let g = CarnotGroup::builtin("g235")?;
    let sol = solve_contact_fields(&g, 2)?;
    for (d, dim) in sol.table() {
        println!("degree <= {d}: {dim}");
    }
    let w = g.weights();
    for z in sol.basis.iter().take(3) {
        println!("{}  contact: {}", z.fmt_with(w), is_contact(&g, z)?);
    }

    for name in ["heisenberg", "engel", "g235"] {
        let probe = rigidity_probe(&CarnotGroup::builtin(name)?, 5)?;
        println!("{name}: {}", probe.verdict);
    }
    Ok(())
}
