mod common;

use carnot::contact::{bracket_residual, contact_residual, is_contact, solve_contact_fields};
use carnot::exterior::{is_vertical, weight_of, DxToSigma, FormBasis, PolyForm, Weight};
use carnot::flows::{check_contact, FlowMap};
use carnot::group::CarnotGroup;
use carnot::poly::Polynomial;
use carnot::rational::Q;
use common::{group, random_field, random_form, random_indices, random_q, rng, BUILTINS};
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn d_squared_vanishes(seed in any::<u64>(), gi in 0..BUILTINS.len()) {
        let n = group(BUILTINS[gi]).dim();
        let mut r = rng(seed);
        let k = r.gen_range(0..n);
        let omega = random_form(&mut r, n, k, 4, FormBasis::Coordinate);
        let dd = omega.d().unwrap().d().unwrap();
        prop_assert!(dd.is_zero());
    }

    #[test]
    fn cartan_formula(seed in any::<u64>(), gi in 0..BUILTINS.len()) {
        let n = group(BUILTINS[gi]).dim();
        let mut r = rng(seed);
        let k = r.gen_range(1..=n);
        let omega = random_form(&mut r, n, k, 3, FormBasis::Coordinate);
        let x = random_field(&mut r, n, 2);
        let lie = omega.lie_derivative(&x).unwrap();
        let exact = omega.interior(&x.components).d().unwrap();
        // No (n+1)-forms: for top degree only the exact term survives.
        let magic = if k == n { exact } else { omega.d().unwrap().interior(&x.components).add(&exact) };
        prop_assert_eq!(lie, magic);
    }

    #[test]
    fn vertical_forms_annihilate_top_weight(seed in any::<u64>(), gi in 0..BUILTINS.len()) {
        let g = group(BUILTINS[gi]);
        let n = g.dim();
        let d1 = g.algebra().strata()[0];
        let mut r = rng(seed);
        // η: constant combination of non-horizontal σ's.
        let mut eta = PolyForm::zero(n, 1, FormBasis::LeftInvariant);
        for t in d1..n {
            eta = eta.add(&g.sigma(&[t]).scale(&Polynomial::constant(random_q(&mut r, 4, 3))));
        }
        prop_assume!(!eta.is_zero());
        prop_assert!(is_vertical(&g, &eta).unwrap());
        // Weight −ν + 1 in degree n − 1 means σ̂_j with j horizontal.
        let j = r.gen_range(0..d1);
        let beta = g.sigma_hat(j).scale(&common::random_poly(&mut r, n, 2, 3));
        prop_assume!(!beta.is_zero());
        let nu = g.homogeneous_dimension() as i32;
        prop_assert_eq!(weight_of(&g, &beta).unwrap(), Weight::Homogeneous(-nu + 1));
        prop_assert!(eta.wedge(&beta).is_zero());
    }

    #[test]
    fn dilation_pullback_scales_by_weight(seed in any::<u64>(), gi in 0..BUILTINS.len(), t in 2i64..5) {
        let g = group(BUILTINS[gi]);
        let n = g.dim();
        let mut r = rng(seed);
        let k = r.gen_range(1..=n);
        let idx = random_indices(&mut r, n, k);
        let sigma = g.sigma(&idx);
        let Weight::Homogeneous(w) = weight_of(&g, &sigma).unwrap() else { panic!("σ_I is homogeneous") };
        let t = Q::new(t.into(), 3.into());
        let pulled = g.to_coordinate(&sigma).unwrap().pullback(&g.dilation(&t).unwrap()).unwrap();
        let factor = num_traits::pow(t, (-w) as usize);
        let expected = g.to_coordinate(&sigma.scale(&Polynomial::constant(factor))).unwrap();
        prop_assert_eq!(pulled, expected);
    }

    #[test]
    fn residual_formulations_agree(seed in any::<u64>(), gi in 0..BUILTINS.len()) {
        let g = group(BUILTINS[gi]);
        let mut r = rng(seed);
        let z = random_field(&mut r, g.dim(), 3);
        let a = contact_residual(&g, &z).unwrap();
        let b = bracket_residual(&g, &z).unwrap();
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert_eq!((x.direction, x.target), (y.direction, y.target));
            prop_assert_eq!(&x.value, &y.value);
        }
    }

    #[test]
    fn left_translates_of_contact_fields_are_contact(seed in any::<u64>(), gi in 0..BUILTINS.len()) {
        let g = group(BUILTINS[gi]);
        let mut r = rng(seed);
        let a: Vec<Q> = (0..g.dim()).map(|_| random_q(&mut r, 3, 2)).collect();
        let la = g.left_translation(&a).unwrap();
        let sol = solve_contact_fields(&g, 1).unwrap();
        for z in sol.basis.iter().step_by(3) {
            let moved = la.pushforward(z).unwrap();
            prop_assert!(is_contact(&g, &moved).unwrap());
            prop_assert!(sol.contains(&g, &moved).unwrap());
        }
    }
}

#[test]
fn kernels_are_nested() {
    for name in BUILTINS {
        let g = CarnotGroup::builtin(name).unwrap();
        let big = solve_contact_fields(&g, 3).unwrap();
        for d in 0..3 {
            for z in &solve_contact_fields(&g, d).unwrap().basis {
                assert!(big.contains(&g, z).unwrap(), "{name} D={d}");
            }
        }
    }
}

#[test]
fn flows_of_kernel_fields_are_contact_maps() {
    for name in ["heisenberg", "engel"] {
        let g = CarnotGroup::builtin(name).unwrap();
        let pts: Vec<Vec<f64>> = vec![vec![0.1; g.dim()], (0..g.dim()).map(|i| 0.2 - 0.1 * i as f64).collect()];
        for z in solve_contact_fields(&g, 1).unwrap().basis {
            let f = FlowMap::new(&z, 0.3);
            let defect = check_contact(&g, &f, &pts, 1e-8).unwrap();
            assert!(defect <= 1e-8, "{name}: {defect:e}");
        }
    }
}
