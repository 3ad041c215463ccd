//! Weak contact test: a kernel field passes, a perturbed one fails, and a
//! contact pushforward preserves the verdict.

use carnot::contact::solve_contact_fields;
use carnot::flows::PolyContactMap;
use carnot::group::{CarnotGroup, LeftPolyField};
use carnot::poly::parse_polynomial;
use carnot::rational::q_frac;
use carnot::weak::{is_weak_contact, verify_pushforward, TestFamily};

fn main() -> carnot::error::Result<()> {
    let g = CarnotGroup::builtin("engel")?;
    let n = g.dim();
    let (lo, hi) = (vec![-1.0; n], vec![1.0; n]);
    let family = TestFamily::standard(&g, &lo, &hi, TestFamily::exact_order(&g, 6))?;

    let z = solve_contact_fields(&g, 1)?.basis[5].clone();
    let good = LeftPolyField::from_field(&g, &z)?;
    let report = is_weak_contact(&g, &good, &family, 1e-8)?;
    println!("kernel field: max {:.2e}, pass {}", report.max_residual, report.pass);

    let bad = z.add(&g.left_frame()[0].mul_function(&parse_polynomial("x3")?));
    let report = is_weak_contact(&g, &LeftPolyField::from_field(&g, &bad)?, &family, 1e-8)?;
    println!("perturbed field: max {:.2e}, pass {}", report.max_residual, report.pass);

    let shift = PolyContactMap::left_translation(&g, &[q_frac(1, 4), q_frac(-1, 4), q_frac(0, 1), q_frac(1, 8)])?;
    let small = TestFamily::standard(&g, &vec![-0.5; n], &vec![0.5; n], family.order)?;
    let pushed = verify_pushforward(&g, &shift, &good, &small, 1e-8, 1e-9)?;
    println!("pushforward: max {:.2e}, pass {}", pushed.max_residual, pushed.pass);
    Ok(())
}
