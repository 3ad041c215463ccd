//! The ten acceptance criteria, one pass/fail line each.
//!
//! Runs without the libtest harness so that the summary lines are always
//! printed; the process exits nonzero when any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use carnot::algebra::builtin;
use carnot::bump::TestBump;
use carnot::contact::{contact_residual, rigidity_probe, solve_contact_fields, Verdict};
use carnot::exterior::{verify_weight_bound, DxToSigma, FormBasis, PolyForm};
use carnot::flows::{verify_identity_in_chart, Composition, ContactMap, FlowMap, PolyContactMap};
use carnot::group::{CarnotGroup, LeftPolyField, NumericField, PolyVectorField};
use carnot::mollifier::{BumpForm, ContinuousForm, Mollifier};
use carnot::poly::{Monomial, Polynomial};
use carnot::rational::{q_frac, q_int, Q};
use carnot::weak::{bump_stock, is_weak_contact, verify_mollification_stability, verify_pushforward, TestFamily};
use common::{group, random_field, random_form, random_poly, random_q, rng, BUILTINS};
use rand::Rng;

type Outcome = std::result::Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration, what: &str) -> std::result::Result<(), String> {
    let t = start.elapsed();
    ensure(t <= limit, || format!("{what} took {t:.1?}, limit {limit:?}"))
}

fn algebra_exactness() -> Outcome {
    let start = Instant::now();
    let names = ["heisenberg", "heisenberg(2)", "engel", "free(2,2)", "free(2,3)", "g235"];
    for name in names {
        let report = builtin(name).map_err(|e| e.to_string())?.validate();
        ensure(report.all_passed(), || format!("{name}: {report}"))?;
    }
    within(start, Duration::from_secs(1), "validation")?;
    Ok(format!("{} algebras, all four checks exact", names.len()))
}

fn group_law() -> Outcome {
    let start = Instant::now();
    let mut r = rng(2);
    for name in BUILTINS {
        let g = group(name);
        let n = g.dim();
        let zero = vec![q_int(0); n];
        for _ in 0..100 {
            let mut pt = || (0..n).map(|_| random_q(&mut r, 5, 4)).collect::<Vec<Q>>();
            let (x, y, z) = (pt(), pt(), pt());
            let prod = |a: &[Q], b: &[Q]| g.product(a, b).unwrap();
            let lhs = prod(&prod(&x, &y), &z);
            let rhs = prod(&x, &prod(&y, &z));
            ensure(lhs == rhs, || format!("{name}: associativity fails at {x:?}, {y:?}, {z:?}"))?;
            let inv = g.inverse(&x);
            ensure(inv.iter().zip(&x).all(|(a, b)| *a == -b.clone()), || format!("{name}: inverse is not negation"))?;
            ensure(prod(&x, &inv) == zero && prod(&zero, &x) == x, || format!("{name}: identity fails"))?;
        }
    }
    within(start, Duration::from_secs(10), "group law")?;
    Ok(format!("{} groups x 100 rational triples", BUILTINS.len()))
}

fn frames() -> Outcome {
    for name in BUILTINS {
        let g = group(name);
        let alg = g.algebra();
        let n = g.dim();
        let left = g.left_frame();
        for a in 0..n {
            for b in 0..n {
                let coeffs: Vec<Polynomial> =
                    (0..n).map(|k| Polynomial::constant(alg.structure_constant(a, b, k))).collect();
                let expected = PolyVectorField::combination(left, &coeffs);
                ensure(left[a].lie_bracket(&left[b]) == expected, || format!("{name}: [X_{a}, X_{b}]"))?;
            }
        }
        for xr in g.right_frame() {
            for xj in &left[..alg.strata()[0]] {
                ensure(xr.lie_bracket(xj).is_zero(), || format!("{name}: right field does not commute"))?;
            }
        }
        let m = g.left_coframe_matrix();
        for a in 0..n {
            for b in 0..n {
                let mut pairing = Polynomial::zero();
                for c in 0..n {
                    pairing += &(&m[a][c] * &left[b].components[c]);
                }
                let delta = Polynomial::constant(q_int(i64::from(a == b)));
                ensure(pairing == delta, || format!("{name}: σ_{a}(X_{b}) = {pairing}"))?;
            }
        }
        let all: Vec<usize> = (0..n).collect();
        let vol = g.to_coordinate(&g.sigma(&all)).map_err(|e| e.to_string())?;
        let dx = PolyForm::monomial(n, &all, Polynomial::constant(q_int(1)), FormBasis::Coordinate);
        ensure(vol == dx, || format!("{name}: wedge of the coframe is not dx"))?;
    }
    Ok(format!("{} groups: brackets, right/left commutation, duality, volume", BUILTINS.len()))
}

fn weight_bound() -> Outcome {
    let mut r = rng(4);
    let mut total = 0;
    for name in BUILTINS {
        let g = group(name);
        let n = g.dim();
        for _ in 0..500 {
            let k = r.gen_range(1..=n);
            let idx = common::random_indices(&mut r, n, k);
            let exps: Vec<u32> = (0..n).map(|_| r.gen_range(0..3)).collect();
            let basis = if r.gen_bool(0.5) { FormBasis::Coordinate } else { FormBasis::LeftInvariant };
            let coeff = Polynomial::term(Monomial::from_exponents(&exps), q_int(r.gen_range(1..5)));
            let omega = PolyForm::monomial(n, &idx, coeff, basis);
            let ok = verify_weight_bound(&g, &omega).map_err(|e| e.to_string())?;
            ensure(ok, || format!("{name}: bound fails for {omega:?}"))?;
            total += 1;
        }
    }
    Ok(format!("{total} monomial forms, zero failures"))
}

fn contact_solver() -> Outcome {
    let start = Instant::now();
    for name in BUILTINS {
        let g = group(name);
        let s = g.step() as i32;
        for d in [s - 1, s] {
            let sol = solve_contact_fields(&g, d).map_err(|e| e.to_string())?;
            for z in g.right_frame() {
                ensure(sol.contains(&g, z).map_err(|e| e.to_string())?, || format!("{name}: right field missing at D={d}"))?;
            }
        }
    }
    let h = group("heisenberg");
    let table = solve_contact_fields(&h, 6).map_err(|e| e.to_string())?.table();
    let dims: Vec<usize> = table.iter().filter(|(d, _)| *d >= 1).map(|(_, k)| *k).collect();
    ensure(dims.windows(2).all(|w| w[1] > w[0]), || format!("heisenberg not strictly increasing: {dims:?}"))?;
    let g = group("g235");
    let probe = rigidity_probe(&g, 8).map_err(|e| e.to_string())?;
    ensure(matches!(probe.verdict, Verdict::Stabilized { dimension: 14, .. }), || format!("g235: {}", probe.verdict))?;
    let oracle = common::tanaka::prolongation(g.algebra(), 8);
    let total = g.dim() + oracle.dims.iter().sum::<usize>();
    ensure(total == 14, || format!("prolongation oracle gives {total}"))?;
    within(start, Duration::from_secs(120), "contact solver")?;
    Ok(format!("heisenberg dims {dims:?}; g235 {} (oracle {total})", probe.verdict))
}

/// A random bump with support well inside `[-1, 1]^n`.
fn random_bump(r: &mut impl Rng, g: &CarnotGroup) -> TestBump {
    loop {
        let c: Vec<f64> = (0..g.dim()).map(|_| r.gen_range(-0.3..0.3)).collect();
        let b = TestBump::new(c, r.gen_range(0.15..0.45)).unwrap();
        if b.check_inside(g, &vec![-1.0; g.dim()], &vec![1.0; g.dim()]).is_ok() {
            return b;
        }
    }
}

fn nonzero_form(r: &mut impl Rng, n: usize, k: usize, degree: u32, basis: FormBasis) -> PolyForm {
    loop {
        let f = random_form(r, n, k, degree, basis);
        if !f.is_zero() {
            return f;
        }
    }
}

fn mollification_suite() -> Outcome {
    let start = Instant::now();
    let mut r = rng(6);
    let mut worst_mass: f64 = 0.0;
    let mut worst_dual: f64 = 0.0;
    let mut instances = 0;
    for name in BUILTINS {
        let g = group(name);
        let n = g.dim();
        let h = if n <= 4 { 1.0 / 12.0 } else { 1.0 / 10.0 };
        for eps in [1.0, 0.5, 0.25] {
            let m = Mollifier::new(&g, eps).map_err(|e| e.to_string())?;
            let err = (m.total_mass(h) - 1.0).abs();
            worst_mass = worst_mass.max(err);
            ensure(err <= 1e-8, || format!("{name}: mass error {err:e} at eps {eps}"))?;
        }
        for _ in 0..20 {
            let eps = [1.0, 0.5, 0.25][r.gen_range(0..3)];
            let m = Mollifier::new(&g, eps).map_err(|e| e.to_string())?;
            let k = r.gen_range(0..=n);
            let basis = if r.gen_bool(0.5) { FormBasis::Coordinate } else { FormBasis::LeftInvariant };
            let theta = nonzero_form(&mut r, n, k, 2, basis);
            let beta_form = nonzero_form(&mut r, n, n - k, 1, FormBasis::LeftInvariant);
            let beta = BumpForm::new(&g, random_bump(&mut r, &g), &beta_form).map_err(|e| e.to_string())?;
            let res = m.verify_duality(&theta, &beta).map_err(|e| e.to_string())?;
            worst_dual = worst_dual.max(res.residual);
            ensure(res.residual <= 1e-7, || format!("{name}: duality residual {res:?}"))?;

            let ka = r.gen_range(1..=n);
            let alpha = PolyForm::monomial(
                n,
                &common::random_indices(&mut r, n, ka),
                Polynomial::constant(random_q(&mut r, 3, 2) + q_frac(1, 7)),
                FormBasis::LeftInvariant,
            );
            let x = random_field(&mut r, n, 2);
            let beta_form = nonzero_form(&mut r, n, n - ka + 1, 1, FormBasis::LeftInvariant);
            let beta = BumpForm::new(&g, random_bump(&mut r, &g), &beta_form).map_err(|e| e.to_string())?;
            let res = m.verify_interior_duality(&alpha, &x, &beta).map_err(|e| e.to_string())?;
            worst_dual = worst_dual.max(res.residual);
            ensure(res.residual <= 1e-7, || format!("{name}: interior duality residual {res:?}"))?;
            instances += 2;
        }
        // dθ^ε = (dθ)^ε: the central-difference residual must fall like h².
        let m = Mollifier::new(&g, 0.5).map_err(|e| e.to_string())?;
        let mut c0 = random_poly(&mut r, n, 3, 3);
        c0.add_term(Monomial::one(), &q_int(1));
        let theta = PolyForm::monomial(n, &[0], c0, FormBasis::LeftInvariant)
            .add(&PolyForm::monomial(n, &[n - 1], Polynomial::var(0).pow(2), FormBasis::LeftInvariant));
        let pts: Vec<Vec<f64>> = (0..3).map(|_| (0..n).map(|_| r.gen_range(-0.4..0.4)).collect()).collect();
        let r1 = m.verify_d_commutes(&theta, &pts, 2e-2).map_err(|e| e.to_string())?;
        let r2 = m.verify_d_commutes(&theta, &pts, 1e-2).map_err(|e| e.to_string())?;
        let ratio = r1 / r2;
        ensure((3.0..5.0).contains(&ratio), || format!("{name}: d-commutation ratio {ratio} ({r1:e}, {r2:e})"))?;
    }
    // Uniform convergence for continuous coefficients, monotone in ε = 2^-m.
    let mut tail = String::new();
    for name in ["heisenberg", "engel"] {
        let g = group(name);
        let n = g.dim();
        let theta = ContinuousForm::new(n, 1)
            .with(&[0], |x: &[f64]| (x[0] - 0.1).abs() + x[1].abs().sqrt())
            .with(&[n - 1], move |x: &[f64]| (x[0] * x[1]).cos() * x[n - 1].abs());
        let axis = [-0.3, -0.1, 0.0, 0.1, 0.25];
        let pts: Vec<Vec<f64>> = axis
            .iter()
            .flat_map(|a| axis.iter().map(move |b| (0..n).map(|i| if i == 0 { *a } else if i == 1 { *b } else { 0.5 * a * b }).collect()))
            .collect();
        let errors: Vec<f64> = (0..=6)
            .map(|m| Mollifier::new(&g, 0.5f64.powi(m)).map(|mo| mo.sup_error(&theta, &pts)))
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| e.to_string())?;
        ensure(errors.windows(2).all(|w| w[1] < w[0]), || format!("{name}: not monotone {errors:?}"))?;
        tail = format!("{tail} {name} sup error {:.1e} -> {:.1e};", errors[0], errors[6]);
    }
    within(start, Duration::from_secs(300), "mollification suite")?;
    Ok(format!("mass err {worst_mass:.1e}, {instances} duality instances max {worst_dual:.1e};{tail}"))
}

/// Pairs in the order `TestFamily::standard` builds them, with the expected
/// weak residual `(−1)^j ∫ R_(t,j) φ` from the exact contact residual.
fn oracle_residuals(g: &CarnotGroup, z: &PolyVectorField, lo: &[f64], hi: &[f64], order: usize) -> Vec<f64> {
    let n = g.dim();
    let d1 = g.algebra().strata()[0];
    let res = contact_residual(g, z).unwrap();
    let mut out = Vec::new();
    for bump in bump_stock(g, lo, hi).unwrap() {
        let nodes = bump.nodes(g, order);
        for t in d1..n {
            for j in 0..d1 {
                let entry = res.iter().find(|e| e.direction == j && g.algebra().index(e.target).unwrap() == t).unwrap();
                let p = entry.value.compile();
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                out.push(sign * nodes.integrate(|x| p.eval(x)));
            }
        }
    }
    out
}

fn weak_contact_equivalence() -> Outcome {
    let tol = 1e-8;
    let mut r = rng(7);
    let names = ["heisenberg", "engel", "g235"];
    let kernels: Vec<(CarnotGroup, Vec<PolyVectorField>)> = names
        .iter()
        .map(|name| {
            let g = group(name);
            let basis = solve_contact_fields(&g, 1).unwrap().basis;
            (g, basis)
        })
        .collect();
    let (mut positives, mut negatives) = (0, 0);
    let mut min_negative = f64::INFINITY;
    let mut max_positive: f64 = 0.0;
    for case in 0..50 {
        let (g, basis) = &kernels[case % kernels.len()];
        let n = g.dim();
        let mut z = PolyVectorField::zero(n);
        for _ in 0..3 {
            let c = random_q(&mut r, 3, 2);
            z = z.add(&basis[r.gen_range(0..basis.len())].scale(&c));
        }
        if case % 2 == 1 {
            z = z.add(&random_field(&mut r, n, 2));
        }
        let exact = contact_residual(g, &z).map_err(|e| e.to_string())?.iter().all(|e| e.value.is_zero());
        let coeffs = g.left_coefficients(&z).map_err(|e| e.to_string())?;
        let degree = coeffs.iter().filter_map(|c| c.weighted_degree(g.weights())).max().unwrap_or(0);
        let order = TestFamily::exact_order(g, degree);
        let (lo, hi) = (vec![-1.0; n], vec![1.0; n]);
        let family = TestFamily::standard(g, &lo, &hi, order).map_err(|e| e.to_string())?;
        let report = is_weak_contact(g, &LeftPolyField::from_field(g, &z).unwrap(), &family, tol).map_err(|e| e.to_string())?;
        ensure(report.pass == exact, || format!("case {case}: weak {} vs exact {exact}", report.pass))?;
        let expected = oracle_residuals(g, &z, &lo, &hi, order);
        let scale = expected.iter().fold(1e-300f64, |a, v| a.max(v.abs()));
        for ((label, got), want) in report.residuals.iter().zip(&expected) {
            // Reports carry magnitudes; the sign is covered by the unit tests.
            ensure((got - want.abs()).abs() <= 1e-10 * scale + 1e-14, || format!("case {case} {label}: {got:e} vs oracle {want:e}"))?;
        }
        if exact {
            positives += 1;
            max_positive = max_positive.max(report.max_residual);
        } else {
            negatives += 1;
            min_negative = min_negative.min(scale);
            ensure(scale >= 10.0 * tol, || format!("case {case}: negative residual {scale:e} below 10 tol"))?;
        }
    }
    ensure(positives > 0 && negatives > 0, || "one side of the equivalence is untested".into())?;
    Ok(format!("{positives} contact (max {max_positive:.1e}), {negatives} non-contact (min {min_negative:.1e})"))
}

fn mollification_stability() -> Outcome {
    let mut count = 0;
    let mut worst: f64 = 0.0;
    for (name, degree) in [("heisenberg", 2), ("g235", 3)] {
        let g = group(name);
        let n = g.dim();
        let (lo, hi) = (vec![-1.0; n], vec![1.0; n]);
        for z in solve_contact_fields(&g, degree).map_err(|e| e.to_string())?.basis {
            for eps in [0.25, 0.125] {
                let rep = verify_mollification_stability(&g, &z, eps, &lo, &hi, 1e-7).map_err(|e| e.to_string())?;
                worst = worst.max(rep.smoothed.max_residual);
                ensure(rep.smoothed.pass, || format!("{name}: {}", rep.smoothed))?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} smoothed fields, max residual {worst:.1e}"))
}

/// `ℓ_a`, `δ_2`, `ℓ_a ∘ δ_2` and the time-`0.2` flow of a kernel field.
fn map_set(g: &CarnotGroup, flowed: &PolyVectorField) -> Vec<Arc<dyn ContactMap>> {
    let n = g.dim();
    let a: Vec<Q> = (0..n).map(|i| q_frac([1, -1, 2, 1, -1][i % 5], [2, 3, 5, 4, 7][i % 5])).collect();
    let la = Arc::new(PolyContactMap::left_translation(g, &a).unwrap());
    let d2 = Arc::new(PolyContactMap::dilation(g, &q_int(2)).unwrap());
    let comp: Arc<dyn ContactMap> = Arc::new(Composition { maps: vec![la.clone(), d2.clone()] });
    let flow: Arc<dyn ContactMap> = Arc::new(FlowMap::new(flowed, 0.2));
    vec![la, d2, comp, flow]
}

/// A kernel field that is not right-invariant, so its flow is not a translation.
fn nontrivial_kernel_field(g: &CarnotGroup) -> PolyVectorField {
    let sol = solve_contact_fields(g, 1).unwrap();
    sol.basis.into_iter().rev().find(|z| z.components.iter().any(|c| c.weighted_degree(g.weights()).unwrap_or(0) > 1)).unwrap()
}

fn pushforward_theorem() -> Outcome {
    let start = Instant::now();
    let mut count = 0;
    let mut worst: f64 = 0.0;
    for name in ["heisenberg", "engel", "g235"] {
        let g = group(name);
        let n = g.dim();
        let flowed = nontrivial_kernel_field(&g);
        let maps = map_set(&g, &flowed);
        let sol = solve_contact_fields(&g, g.step() as i32 - 1).map_err(|e| e.to_string())?;
        let fields: Vec<&PolyVectorField> = if n <= 4 { sol.basis.iter().collect() } else { sol.basis.iter().step_by(2).collect() };
        let (lo, hi) = (vec![-1.0; n], vec![1.0; n]);
        let family = TestFamily::standard(&g, &lo, &hi, 6).map_err(|e| e.to_string())?;
        for f in &maps {
            for z in &fields {
                let zf = LeftPolyField::from_field(&g, z).map_err(|e| e.to_string())?;
                let rep = verify_pushforward(&g, f.as_ref(), &zf as &dyn NumericField, &family, 1e-6, 1e-6)
                    .map_err(|e| format!("{name} {}: {e}", f.label()))?;
                worst = worst.max(rep.max_residual);
                ensure(rep.pass, || format!("{name} {}: {rep}", f.label()))?;
                count += 1;
            }
        }
    }
    within(start, Duration::from_secs(600), "pushforward sweep")?;
    Ok(format!("{count} (map, field) pairs, max residual {worst:.1e}"))
}

fn identity_in_chart() -> Outcome {
    let g = group("heisenberg");
    let flowed = nontrivial_kernel_field(&g);
    let right: Vec<LeftPolyField> = g.right_frame().iter().map(|z| LeftPolyField::from_field(&g, z).unwrap()).collect();
    let fields: Vec<&dyn NumericField> = right.iter().map(|z| z as &dyn NumericField).collect();
    let mut worst: f64 = 0.0;
    let mut points = 0;
    for f in map_set(&g, &flowed) {
        for p in [vec![0.0; 3], vec![0.2, -0.1, 0.3]] {
            let rep = verify_identity_in_chart(&g, f.as_ref(), &p, &fields, 0.1, 5).map_err(|e| e.to_string())?;
            ensure(rep.max_error <= 1e-6, || format!("{} at {p:?}: {:e}", f.label(), rep.max_error))?;
            worst = worst.max(rep.max_error);
            points += rep.points;
        }
    }
    Ok(format!("{points} chart points over 4 maps, sup error {worst:.1e}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("algebra exactness", algebra_exactness),
        ("group law", group_law),
        ("frames", frames),
        ("weight bound", weight_bound),
        ("contact solver", contact_solver),
        ("mollification suite", mollification_suite),
        ("weak-contact equivalence", weak_contact_equivalence),
        ("mollification stability", mollification_stability),
        ("pushforward", pushforward_theorem),
        ("identity in chart", identity_in_chart),
    ];
    let only: Option<usize> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        if only.is_some_and(|k| k != i + 1) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} {name:<26} PASS  {detail}  [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} {name:<26} FAIL  {detail}  [{secs:.1}s]", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
