//! Exact group law in exponential coordinates, dilations and translations.

use carnot::group::CarnotGroup;
use carnot::rational::{fmt_q, q_frac, q_int, Q};

fn show(p: &[Q]) -> String {
    format!("({})", p.iter().map(fmt_q).collect::<Vec<_>>().join(", "))
}

fn main() -> carnot::error::Result<()> {
    let g = CarnotGroup::builtin("engel")?;
    // In the law, x1..x4 are the coordinates of x and x5..x8 those of y.
    for (a, p) in g.law().iter().enumerate() {
        println!("(x*y)_{} = {p}", a + 1);
    }

    let x = vec![q_int(1), q_frac(1, 2), q_int(0), q_frac(-1, 3)];
    let y = vec![q_frac(2, 3), q_int(-1), q_int(1), q_int(0)];
    let xy = g.product(&x, &y)?;
    println!("x*y = {}", show(&xy));
    println!("x^-1 * (x*y) = {}", show(&g.product(&g.inverse(&x), &xy)?));

    let d = g.dilation(&q_int(2))?;
    println!("delta_2(x) = {}", show(&d.apply(&x)));
    println!("det D(l_x) = {}", g.left_translation(&x)?.jacobian_det());
    Ok(())
}
