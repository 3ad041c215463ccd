#![allow(dead_code)]

pub mod tanaka;

use carnot::group::CarnotGroup;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const BUILTINS: [&str; 6] = ["heisenberg", "heisenberg(2)", "engel", "free(2,2)", "free(2,3)", "g235"];

pub fn group(name: &str) -> CarnotGroup {
    CarnotGroup::builtin(name).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

use carnot::exterior::{FormBasis, PolyForm};
use carnot::group::PolyVectorField;
use carnot::poly::{Monomial, Polynomial};
use carnot::rational::{q_frac, Q};
use rand::Rng;

pub fn random_q(rng: &mut impl Rng, num: i64, den: i64) -> Q {
    q_frac(rng.gen_range(-num..=num), rng.gen_range(1..=den))
}

/// A polynomial with up to `terms` terms of total degree `≤ degree` and
/// small rational coefficients.
pub fn random_poly(rng: &mut impl Rng, n: usize, degree: u32, terms: usize) -> Polynomial {
    let mut p = Polynomial::zero();
    for _ in 0..rng.gen_range(1..=terms) {
        let mut exps = vec![0u32; n];
        for _ in 0..rng.gen_range(0..=degree) {
            exps[rng.gen_range(0..n)] += 1;
        }
        p.add_term(Monomial::from_exponents(&exps), &random_q(rng, 3, 2));
    }
    p
}

pub fn random_field(rng: &mut impl Rng, n: usize, degree: u32) -> PolyVectorField {
    PolyVectorField::new((0..n).map(|_| random_poly(rng, n, degree, 3)).collect())
}

/// A random sorted index set of size `k` out of `n`.
pub fn random_indices(rng: &mut impl Rng, n: usize, k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rng.gen_range(i..n);
        idx.swap(i, j);
    }
    let mut out = idx[..k].to_vec();
    out.sort_unstable();
    out
}

/// A `k`-form with one or two random monomial components.
pub fn random_form(rng: &mut impl Rng, n: usize, k: usize, degree: u32, basis: FormBasis) -> PolyForm {
    let mut out = PolyForm::zero(n, k, basis);
    for _ in 0..rng.gen_range(1..=2) {
        let idx = random_indices(rng, n, k);
        out = out.add(&PolyForm::monomial(n, &idx, random_poly(rng, n, degree, 2), basis));
    }
    out
}
