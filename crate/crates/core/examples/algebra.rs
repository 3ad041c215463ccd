//! Build a stratified Lie algebra by hand, validate it, and compare with
//! the builtin free nilpotent algebras.

use carnot::algebra::{builtin, parse_group_file};

fn main() -> carnot::error::Result<()> {
    let engel = parse_group_file(
        "name = engel
strata = [2, 1, 1]
[ (1,1), (1,2) ] = (2,1)
[ (1,1), (2,1) ] = (3,1)
",
    )?;
    println!("{}", engel.validate());

    for name in ["free(2,3)", "free(3,2)", "g235"] {
        let alg = builtin(name)?;
        println!("{name}: strata {:?}, homogeneous dimension {}", alg.strata(), alg.homogeneous_dimension());
    }

    // Drop one bracket from the Heisenberg-like relations: Jacobi breaks.
    let broken = parse_group_file(
        "strata = [3, 3, 1]
[ (1,1), (1,2) ] = (2,3)
[ (1,2), (1,3) ] = (2,1)
[ (1,3), (1,1) ] = (2,2)
[ (1,1), (2,1) ] = (3,1)
",
    )?;
    let report = broken.validate();
    println!("all checks pass: {}", report.all_passed());
    if let Some((a, b, c)) = broken.first_jacobi_violation() {
        println!("Jacobi fails on {}, {}, {}", broken.basis_index(a), broken.basis_index(b), broken.basis_index(c));
    }
    Ok(())
}
