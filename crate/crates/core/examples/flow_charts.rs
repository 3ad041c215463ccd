//! Flows of contact fields, conjugacy, and a contact map seen as the
//! identity in flow charts.

use carnot::contact::solve_contact_fields;
use carnot::flows::{check_contact, verify_conjugacy, verify_identity_in_chart, FlowMap, OdeOptions, PolyContactMap};
use carnot::group::{CarnotGroup, LeftPolyField, NumericField};
use carnot::rational::q_frac;

fn main() -> carnot::error::Result<()> {
    let g = CarnotGroup::builtin("heisenberg")?;
    let z = solve_contact_fields(&g, 1)?.basis.last().cloned().expect("nonempty kernel");
    let flow = FlowMap::new(&z, 0.25);
    let pts = vec![vec![0.1, -0.2, 0.05], vec![-0.3, 0.1, 0.2]];
    println!("horizontal defect of the flow: {:.2e}", check_contact(&g, &flow, &pts, 1e-8)?);

    let f = PolyContactMap::left_translation(&g, &[q_frac(1, 2), q_frac(0, 1), q_frac(-1, 3)])?;
    let y = LeftPolyField::from_field(&g, &g.left_frame()[0])?;
    let rep = verify_conjugacy(&g, &f, &y, &[0.1, 0.2, 0.3], 0.5, &OdeOptions::default())?;
    println!("conjugacy: coordinate {:.2e}, gauge {:.2e}", rep.coordinate, rep.gauge);

    let right: Vec<LeftPolyField> =
        g.right_frame().iter().map(|x| LeftPolyField::from_field(&g, x)).collect::<Result<_, _>>()?;
    let fields: Vec<&dyn NumericField> = right.iter().map(|x| x as &dyn NumericField).collect();
    let chart = verify_identity_in_chart(&g, &flow, &[0.0; 3], &fields, 0.1, 3)?;
    println!("chart check over {} points: max error {:.2e}", chart.points, chart.max_error);
    Ok(())
}
