//! Hall basis of the free nilpotent Lie algebra.
//!
//! Elements are ordered by degree and, within a degree, by generation order.
//! `[u, v]` is basic when `u > v` and, if `u = [u1, u2]`, also `u2 <= v`.
//! Structure constants are obtained by expanding basic brackets as
//! commutators in the free associative algebra and solving for Hall
//! coordinates exactly.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use super::StratifiedLieAlgebra;
use crate::error::{CarnotError, Result};
use crate::linalg;
use crate::rational::{q_int, Q};

/// A Hall basis element, referring to earlier elements by position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HallElement {
    Generator(usize),
    Bracket(usize, usize),
}

/// Noncommutative polynomial: word -> coefficient.
type Assoc = BTreeMap<Vec<u8>, Q>;

/// Hall basis of the free nilpotent algebra on `m` generators of step `s`,
/// with the degree of each element.
pub fn hall_basis(m: usize, s: usize) -> Vec<(HallElement, usize)> {
    let mut out: Vec<(HallElement, usize)> =
        (0..m).map(|i| (HallElement::Generator(i), 1)).collect();
    for d in 2..=s {
        let mut new = Vec::new();
        for u in 0..out.len() {
            for v in 0..u {
                if out[u].1 + out[v].1 != d {
                    continue;
                }
                if let HallElement::Bracket(_, u2) = out[u].0 {
                    if u2 > v {
                        continue;
                    }
                }
                new.push((HallElement::Bracket(u, v), d));
            }
        }
        out.extend(new);
    }
    out
}

fn commutator(a: &Assoc, b: &Assoc, max_len: usize) -> Assoc {
    let mut out = Assoc::new();
    for (wa, ca) in a {
        for (wb, cb) in b {
            if wa.len() + wb.len() > max_len {
                continue;
            }
            let c = ca * cb;
            let mut ab = wa.clone();
            ab.extend_from_slice(wb);
            *out.entry(ab).or_insert_with(Q::zero) += &c;
            let mut ba = wb.clone();
            ba.extend_from_slice(wa);
            *out.entry(ba).or_insert_with(Q::zero) -= &c;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Free nilpotent Lie algebra of rank `m` and step `s` in its Hall basis.
pub fn free_nilpotent(m: usize, s: usize) -> Result<StratifiedLieAlgebra> {
    if m < 2 || s < 1 {
        return Err(CarnotError::InvalidAlgebra(format!("free({m},{s}) needs m >= 2 and s >= 1")));
    }
    let basis = hall_basis(m, s);
    let mut strata = vec![0usize; s];
    for (_, d) in &basis {
        strata[d - 1] += 1;
    }
    let n = basis.len();
    let mut alg = StratifiedLieAlgebra::new(format!("free({m},{s})"), strata)?;

    let mut expansions: Vec<Assoc> = Vec::with_capacity(n);
    for (e, _) in &basis {
        let poly = match *e {
            HallElement::Generator(i) => Assoc::from([(vec![i as u8], q_int(1))]),
            HallElement::Bracket(u, v) => commutator(&expansions[u], &expansions[v], s),
        };
        expansions.push(poly);
    }

    // Words of each degree index the coordinates of the linear solve.
    let by_degree = |d: usize| -> Vec<usize> { (0..n).filter(|&i| basis[i].1 == d).collect() };
    for a in 0..n {
        for b in a + 1..n {
            let d = basis[a].1 + basis[b].1;
            if d > s {
                continue;
            }
            let target = commutator(&expansions[a], &expansions[b], s);
            if target.is_empty() {
                continue;
            }
            let cands = by_degree(d);
            let mut words: Vec<&Vec<u8>> = target.keys().collect();
            for &c in &cands {
                words.extend(expansions[c].keys());
            }
            words.sort();
            words.dedup();
            let column = |p: &Assoc| -> Vec<Q> {
                words.iter().map(|w| p.get(*w).cloned().unwrap_or_else(Q::zero)).collect()
            };
            let cols: Vec<Vec<Q>> = cands.iter().map(|&c| column(&expansions[c])).collect();
            let x = linalg::solve_columns(&cols, &column(&target)).ok_or_else(|| {
                CarnotError::InvalidAlgebra(format!("bracket of Hall elements {a},{b} is not in the span"))
            })?;
            let mut value = vec![Q::zero(); n];
            for (c, coeff) in cands.iter().zip(x) {
                value[*c] = coeff;
            }
            alg.set_bracket(a, b, &value)?;
        }
    }
    Ok(alg)
}

/// Renders a Hall element as a nested bracket of generators `x1, x2, ...`.
pub struct HallDisplay<'a> {
    pub basis: &'a [(HallElement, usize)],
    pub index: usize,
}

impl fmt::Display for HallDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.basis[self.index].0 {
            HallElement::Generator(i) => write!(f, "x{}", i + 1),
            HallElement::Bracket(u, v) => write!(
                f,
                "[{}, {}]",
                HallDisplay { basis: self.basis, index: u },
                HallDisplay { basis: self.basis, index: v }
            ),
        }
    }
}
