//! Exact sparse linear algebra over the rationals.
//!
//! Rows are sparse maps `column -> value`. Elimination is Gauss–Jordan with
//! pivots chosen by column order (the caller's column order is the monomial
//! order), so kernels come out in reduced echelon form.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::rational::Q;

pub type SparseRow = BTreeMap<usize, Q>;

/// Result of reducing a matrix to reduced row echelon form.
#[derive(Clone, Debug)]
pub struct Rref {
    pub ncols: usize,
    /// Nonzero rows, each normalized so its pivot entry is 1.
    pub rows: Vec<SparseRow>,
    /// Pivot column of each row in `rows`.
    pub pivots: Vec<usize>,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Columns without a pivot.
    pub fn free_columns(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.ncols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.ncols).filter(|&c| !is_pivot[c]).collect()
    }

    /// Kernel basis: one vector per free column, with a 1 at that column and
    /// zeros at every other free column.
    pub fn kernel(&self) -> Vec<Vec<Q>> {
        self.free_columns()
            .into_iter()
            .map(|free| {
                let mut v = vec![Q::zero(); self.ncols];
                v[free] = Q::one();
                for (row, &p) in self.rows.iter().zip(&self.pivots) {
                    if let Some(c) = row.get(&free) {
                        v[p] = -c.clone();
                    }
                }
                v
            })
            .collect()
    }
}

/// Reduces `rows` (each a sparse row over `ncols` columns) to RREF.
pub fn rref(ncols: usize, rows: Vec<SparseRow>) -> Rref {
    let mut pending: Vec<SparseRow> = rows.into_iter().filter(|r| !r.is_empty()).collect();
    let mut done: Vec<SparseRow> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();

    // Forward elimination, one pivot column at a time in ascending order.
    while !pending.is_empty() {
        let col = pending
            .iter()
            .filter_map(|r| r.keys().next().copied())
            .min()
            .expect("pending rows are nonempty");
        // Choose the sparsest row with leading entry in `col`.
        let (idx, _) = pending
            .iter()
            .enumerate()
            .filter(|(_, r)| r.keys().next() == Some(&col))
            .min_by_key(|(_, r)| r.len())
            .expect("some row leads with col");
        let mut pivot_row = pending.swap_remove(idx);
        let inv = Q::one() / pivot_row[&col].clone();
        for v in pivot_row.values_mut() {
            *v *= &inv;
        }
        let mut next = Vec::with_capacity(pending.len());
        for mut r in pending {
            if let Some(f) = r.get(&col).cloned() {
                axpy(&mut r, &pivot_row, &(-f));
            }
            if !r.is_empty() {
                next.push(r);
            }
        }
        pending = next;
        pivots.push(col);
        done.push(pivot_row);
    }

    // Back substitution to clear entries above pivots.
    for i in (0..done.len()).rev() {
        let (head, tail) = done.split_at_mut(i);
        let pr = &tail[0];
        let col = pivots[i];
        for r in head.iter_mut() {
            if let Some(f) = r.get(&col).cloned() {
                axpy(r, pr, &(-f));
            }
        }
    }
    Rref { ncols, rows: done, pivots }
}

/// `row += f * other`, dropping exact zeros.
pub fn axpy(row: &mut SparseRow, other: &SparseRow, f: &Q) {
    for (c, v) in other {
        let add = v * f;
        match row.get_mut(c) {
            Some(x) => {
                *x += add;
                if x.is_zero() {
                    row.remove(c);
                }
            }
            None => {
                if !add.is_zero() {
                    row.insert(*c, add);
                }
            }
        }
    }
}

pub fn dense_to_sparse(v: &[Q]) -> SparseRow {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (i, x.clone()))
        .collect()
}

pub fn rank(ncols: usize, rows: &[Vec<Q>]) -> usize {
    rref(ncols, rows.iter().map(|r| dense_to_sparse(r)).collect()).rank()
}

/// Solves `Σ_j x_j · columns[j] = target` exactly; `None` if inconsistent.
pub fn solve_columns(columns: &[Vec<Q>], target: &[Q]) -> Option<Vec<Q>> {
    let m = target.len();
    let k = columns.len();
    // Rows of the augmented system [A | b]; column k holds b.
    let rows: Vec<SparseRow> = (0..m)
        .map(|i| {
            let mut r: SparseRow = (0..k)
                .filter(|&j| !columns[j][i].is_zero())
                .map(|j| (j, columns[j][i].clone()))
                .collect();
            if !target[i].is_zero() {
                r.insert(k, target[i].clone());
            }
            r
        })
        .collect();
    let red = rref(k + 1, rows);
    if red.pivots.contains(&k) {
        return None;
    }
    let mut x = vec![Q::zero(); k];
    for (row, &p) in red.rows.iter().zip(&red.pivots) {
        x[p] = row.get(&k).cloned().unwrap_or_else(Q::zero);
    }
    Some(x)
}

/// True when `v` lies in the span of `basis`.
pub fn in_span(basis: &[Vec<Q>], v: &[Q]) -> bool {
    if basis.is_empty() {
        return v.iter().all(|x| x.is_zero());
    }
    solve_columns(basis, v).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q_int;

    fn row(v: &[i64]) -> Vec<Q> {
        v.iter().map(|&x| q_int(x)).collect()
    }

    #[test]
    fn kernel_of_small_matrix() {
        // x + y + z = 0, y - z = 0 -> kernel spanned by (-2, 1, 1)
        let m = vec![row(&[1, 1, 1]), row(&[0, 1, -1])];
        let red = rref(3, m.iter().map(|r| dense_to_sparse(r)).collect());
        assert_eq!(red.rank(), 2);
        let k = red.kernel();
        assert_eq!(k, vec![row(&[-2, 1, 1])]);
    }

    #[test]
    fn solve_and_span() {
        let cols = vec![row(&[1, 0, 1]), row(&[0, 1, 1])];
        assert_eq!(solve_columns(&cols, &row(&[2, 3, 5])), Some(row(&[2, 3])));
        assert!(solve_columns(&cols, &row(&[2, 3, 4])).is_none());
        assert!(in_span(&cols, &row(&[1, 1, 2])));
        assert_eq!(rank(3, &[row(&[1, 2, 3]), row(&[2, 4, 6])]), 1);
    }
}
