//! Polynomial contact vector fields.
//!
//! A field `Z = Σ z_a X_a` (left-invariant frame) is contact when, for every
//! horizontal `X_(1,j)` and every `(l,k)` with `l ≥ 2`,
//!
//! ```text
//! X_(1,j) z_(l,k) = Σ_r z_(l−1,r) α^{l−1,1,k}_{r,j}
//! ```
//!
//! Both sides are homogeneous for the dilations once `z_(l,v)` is split by
//! weighted degree `l + k`, where `k` is the order of the field. The system
//! therefore decouples order by order, and the solver treats each order as an
//! independent exact linear system.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::algebra::BasisIndex;
use crate::error::Result;
use crate::group::{CarnotGroup, PolyVectorField};
use crate::linalg::{in_span, rref, SparseRow};
use crate::poly::{Monomial, Polynomial};
use num_traits::Zero;

use crate::rational::{q_int, Q};

/// One component of the contact residual.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualEntry {
    /// Horizontal direction `j` (0-based basis index).
    pub direction: usize,
    /// The coefficient `(l,k)` with `l ≥ 2`.
    pub target: BasisIndex,
    pub value: Polynomial,
}

/// `X_(1,j) z_(l,k) − Σ_r z_(l−1,r) α^{l−1,1,k}_{r,j}` for every `j` and `l ≥ 2`.
pub fn contact_residual(group: &CarnotGroup, z: &PolyVectorField) -> Result<Vec<ResidualEntry>> {
    let alg = group.algebra();
    let coeffs = group.left_coefficients(z)?;
    let d1 = alg.strata()[0];
    let frame = group.left_frame();
    let mut out = Vec::new();
    for j in 0..d1 {
        for t in d1..alg.dim() {
            let idx = alg.basis_index(t);
            let mut value = frame[j].apply(&coeffs[t]);
            for r in alg.layer_range(idx.layer - 1) {
                let c = alg.structure_constant(r, j, t);
                if !c.is_zero() {
                    value.add_scaled(&coeffs[r], &(-c));
                }
            }
            out.push(ResidualEntry { direction: j, target: idx, value });
        }
    }
    Ok(out)
}

/// Same quantities read off the bracket: the non-horizontal left-frame
/// coefficients of `[X_(1,j), Z]`.
pub fn bracket_residual(group: &CarnotGroup, z: &PolyVectorField) -> Result<Vec<ResidualEntry>> {
    let alg = group.algebra();
    let d1 = alg.strata()[0];
    let mut out = Vec::new();
    for j in 0..d1 {
        let br = group.left_frame()[j].lie_bracket(z);
        let coeffs = group.left_coefficients(&br)?;
        for t in d1..alg.dim() {
            out.push(ResidualEntry { direction: j, target: alg.basis_index(t), value: coeffs[t].clone() });
        }
    }
    Ok(out)
}

pub fn is_contact(group: &CarnotGroup, z: &PolyVectorField) -> Result<bool> {
    Ok(contact_residual(group, z)?.iter().all(|e| e.value.is_zero()))
}

/// Monomials in `n` variables of the given weighted degree, in ascending order.
pub fn monomials_of_weight(weights: &[u32], degree: u32) -> Vec<Monomial> {
    fn rec(weights: &[u32], var: usize, left: u32, exps: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if var == weights.len() {
            if left == 0 {
                out.push(Monomial::from_exponents(exps));
            }
            return;
        }
        let w = weights[var];
        let mut e = 0;
        while e * w <= left {
            exps.push(e);
            rec(weights, var + 1, left - e * w, exps, out);
            exps.pop();
            e += 1;
        }
    }
    let mut out = Vec::new();
    rec(weights, 0, degree, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// The linear system for contact fields of a single homogeneous order.
#[derive(Clone, Debug)]
pub struct ContactSystem {
    pub order: i32,
    /// Unknown `i` is the coefficient of `monomial` in `z_a`.
    pub unknowns: Vec<(usize, Monomial)>,
    pub rows: Vec<SparseRow>,
}

impl ContactSystem {
    pub fn assemble(group: &CarnotGroup, order: i32) -> Self {
        let alg = group.algebra();
        let weights = group.weights();
        let d1 = alg.strata()[0];
        let mut unknowns = Vec::new();
        for a in 0..alg.dim() {
            let deg = weights[a] as i32 + order;
            if deg >= 0 {
                for m in monomials_of_weight(weights, deg as u32) {
                    unknowns.push((a, m));
                }
            }
        }
        // Rows keyed by (direction, target, monomial).
        let mut rows: BTreeMap<(usize, usize, Monomial), SparseRow> = BTreeMap::new();
        let frame = group.left_frame();
        for (col, (a, m)) in unknowns.iter().enumerate() {
            let mono = Polynomial::term(m.clone(), q_int(1));
            for j in 0..d1 {
                if *a >= d1 {
                    for (mm, c) in frame[j].apply(&mono).terms() {
                        add_entry(&mut rows, (j, *a, mm.clone()), col, c.clone());
                    }
                }
                for (t, c) in alg.bracket_basis(*a, j) {
                    if alg.layer_of(t) == alg.layer_of(*a) + 1 {
                        add_entry(&mut rows, (j, t, m.clone()), col, -c);
                    }
                }
            }
        }
        let rows = rows.into_values().filter(|r| !r.is_empty()).collect();
        ContactSystem { order, unknowns, rows }
    }

    pub fn num_unknowns(&self) -> usize {
        self.unknowns.len()
    }

    pub fn num_equations(&self) -> usize {
        self.rows.len()
    }

    /// Kernel vectors in reduced echelon form.
    pub fn kernel(&self) -> Vec<Vec<Q>> {
        rref(self.unknowns.len(), self.rows.clone()).kernel()
    }

    /// Left-frame coefficients `z_a` of a solution vector.
    pub fn coefficients(&self, n: usize, v: &[Q]) -> Vec<Polynomial> {
        let mut z = vec![Polynomial::zero(); n];
        for ((a, m), c) in self.unknowns.iter().zip(v) {
            if !c.is_zero() {
                z[*a].add_term(m.clone(), c);
            }
        }
        z
    }

    /// Coordinates of `z` in this system's unknowns; `None` if `z` uses a
    /// monomial outside the ansatz.
    fn vectorize(&self, z: &[Polynomial]) -> Option<Vec<Q>> {
        let pos: HashMap<(usize, &Monomial), usize> =
            self.unknowns.iter().enumerate().map(|(i, (a, m))| ((*a, m), i)).collect();
        let mut v = vec![q_int(0); self.unknowns.len()];
        for (a, za) in z.iter().enumerate() {
            for (m, c) in za.terms() {
                v[*pos.get(&(a, m))?] = c.clone();
            }
        }
        Some(v)
    }
}

fn add_entry(rows: &mut BTreeMap<(usize, usize, Monomial), SparseRow>, key: (usize, usize, Monomial), col: usize, c: Q) {
    let row = rows.entry(key).or_default();
    let v = row.remove(&col).map_or(c.clone(), |old| old + c);
    if !v.is_zero() {
        row.insert(col, v);
    }
}

/// Kernel of the contact system for all orders `−s ..= D`.
#[derive(Clone, Debug)]
pub struct ContactSolution {
    pub degree: i32,
    /// Per-order systems and their kernels.
    pub orders: Vec<(ContactSystem, Vec<Vec<Q>>)>,
    /// Kernel fields in the coordinate frame, ordered by order then echelon position.
    pub basis: Vec<PolyVectorField>,
}

impl ContactSolution {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// Kernel dimension of the order-`k` block alone.
    pub fn order_dimension(&self, k: i32) -> usize {
        self.orders.iter().find(|(s, _)| s.order == k).map_or(0, |(_, ker)| ker.len())
    }

    /// Dimension of the ansatz of order `≤ d`, for `d ≤ degree`.
    pub fn dimension_at(&self, d: i32) -> usize {
        self.orders.iter().filter(|(s, _)| s.order <= d).map(|(_, k)| k.len()).sum()
    }

    /// `(D, dim)` for `D = 0 ..= degree`.
    pub fn table(&self) -> Vec<(i32, usize)> {
        (0..=self.degree).map(|d| (d, self.dimension_at(d))).collect()
    }

    /// Exact membership of `z` in the span of the kernel.
    pub fn contains(&self, group: &CarnotGroup, z: &PolyVectorField) -> Result<bool> {
        let coeffs = group.left_coefficients(z)?;
        let weights = group.weights();
        let mut split: BTreeMap<i32, Vec<Polynomial>> = BTreeMap::new();
        for (a, za) in coeffs.iter().enumerate() {
            for (m, c) in za.terms() {
                let k = m.weighted_degree(weights) as i32 - weights[a] as i32;
                split.entry(k).or_insert_with(|| vec![Polynomial::zero(); coeffs.len()])[a].add_term(m.clone(), c);
            }
        }
        for (k, part) in split {
            let Some((sys, ker)) = self.orders.iter().find(|(s, _)| s.order == k) else { return Ok(false) };
            let Some(v) = sys.vectorize(&part) else { return Ok(false) };
            if !in_span(ker, &v) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Solves the contact system for fields of order `≤ degree`.
pub fn solve_contact_fields(group: &CarnotGroup, degree: i32) -> Result<ContactSolution> {
    let s = group.step() as i32;
    let mut orders = Vec::new();
    let mut basis = Vec::new();
    for k in -s..=degree {
        let sys = ContactSystem::assemble(group, k);
        let ker = sys.kernel();
        for v in &ker {
            basis.push(group.from_left_coefficients(&sys.coefficients(group.dim(), v))?);
        }
        orders.push((sys, ker));
    }
    Ok(ContactSolution { degree, orders, basis })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Stabilized { dimension: usize, since: i32 },
    Growing,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Stabilized { dimension, since } => {
                write!(f, "stabilized at {dimension} since degree {since}")
            }
            Verdict::Growing => write!(f, "growing"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ProbeReport {
    pub table: Vec<(i32, usize)>,
    pub verdict: Verdict,
}

/// Kernel dimensions for `D = 0 ..= d_max`; stabilized when the last three agree.
pub fn rigidity_probe(group: &CarnotGroup, d_max: i32) -> Result<ProbeReport> {
    let sol = solve_contact_fields(group, d_max)?;
    let table = sol.table();
    let verdict = probe_verdict(&table);
    Ok(ProbeReport { table, verdict })
}

/// Applies the three-equal-dimensions rule to a dimension table.
pub fn probe_verdict(table: &[(i32, usize)]) -> Verdict {
    let n = table.len();
    if n >= 3 && table[n - 1].1 == table[n - 2].1 && table[n - 2].1 == table[n - 3].1 {
        let dim = table[n - 1].1;
        let since = table.iter().find(|(_, d)| *d == dim).map_or(table[n - 3].0, |(k, _)| *k);
        Verdict::Stabilized { dimension: dim, since }
    } else {
        Verdict::Growing
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_polynomial;

    fn p(s: &str) -> Polynomial {
        parse_polynomial(s).unwrap()
    }

    #[test]
    fn right_invariant_fields_are_contact() {
        for name in ["heisenberg", "engel", "g235", "free(3,2)"] {
            let g = CarnotGroup::builtin(name).unwrap();
            for xr in g.right_frame() {
                assert!(is_contact(&g, xr).unwrap(), "{name}");
                let a = contact_residual(&g, xr).unwrap();
                assert_eq!(a, bracket_residual(&g, xr).unwrap());
            }
        }
    }

    #[test]
    fn heisenberg_x3_x1_is_not_contact() {
        let g = CarnotGroup::builtin("heisenberg").unwrap();
        let z = g.left_frame()[0].mul_function(&p("x3"));
        let r = contact_residual(&g, &z).unwrap();
        // j = 2: X2(z3) − z1·α with [X1, X2] = X3.
        assert_eq!(r[1].value, p("-x3"));
        assert!(!is_contact(&g, &z).unwrap());
        assert_eq!(r, bracket_residual(&g, &z).unwrap());
    }

    #[test]
    fn dilation_generator_is_contact() {
        let g = CarnotGroup::builtin("g235").unwrap();
        let comps = g.weights().iter().enumerate().map(|(a, &w)| p(&format!("{w}*x{}", a + 1))).collect();
        assert!(is_contact(&g, &PolyVectorField::new(comps)).unwrap());
    }

    #[test]
    fn g235_per_order_dimensions() {
        let g = CarnotGroup::builtin("g235").unwrap();
        let sol = solve_contact_fields(&g, 4).unwrap();
        let dims: Vec<usize> = (-3..=4).map(|k| sol.order_dimension(k)).collect();
        assert_eq!(dims, vec![2, 1, 2, 4, 2, 1, 2, 0]);
        for z in &sol.basis {
            assert!(is_contact(&g, z).unwrap());
        }
    }

    #[test]
    fn probe_verdicts() {
        assert_eq!(probe_verdict(&[(0, 9), (1, 11), (2, 12), (3, 14), (4, 14), (5, 14)]).to_string(),
            "stabilized at 14 since degree 3");
        assert_eq!(probe_verdict(&[(0, 7), (1, 13), (2, 20)]), Verdict::Growing);
    }
}
