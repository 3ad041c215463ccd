//! Stratified nilpotent Lie algebras given by rational structure constants.
//!
//! Basis vectors are indexed globally, layer-major and slot-minor, so index
//! `a` corresponds to [`BasisIndex`] `(layer, slot)` with `layer` ascending.
//! Brackets are stored for unordered pairs `a < b`; `[b, a]` is derived by
//! negation, so antisymmetry holds by construction for anything stored.

mod builtin;
mod file;
mod hall;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{CarnotError, Result};
use crate::linalg;
use crate::rational::{fmt_q, q_int, Q};

pub use builtin::{builtin, Builtin};
pub use file::{parse_group_file, write_group_file};
pub use hall::{free_nilpotent, hall_basis, HallDisplay, HallElement};

/// Position of a basis vector: layer `l` (1-based) and slot `v` (1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisIndex {
    pub layer: usize,
    pub slot: usize,
}

impl BasisIndex {
    pub fn new(layer: usize, slot: usize) -> Self {
        BasisIndex { layer, slot }
    }
}

impl fmt::Display for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.layer, self.slot)
    }
}

/// An element of the algebra in the adapted basis.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraVector(pub Vec<Q>);

impl AlgebraVector {
    pub fn zero(n: usize) -> Self {
        AlgebraVector(vec![Q::zero(); n])
    }

    pub fn basis(n: usize, a: usize) -> Self {
        let mut v = Self::zero(n);
        v.0[a] = Q::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(crate::rational::q_to_f64).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StratifiedLieAlgebra {
    name: String,
    strata: Vec<usize>,
    offsets: Vec<usize>,
    /// `[e_a, e_b]` for `a < b`, as sparse target coordinates.
    brackets: BTreeMap<(usize, usize), Vec<(usize, Q)>>,
    /// Antisymmetry defects found while the table was being assembled.
    conflicts: Vec<String>,
}

impl StratifiedLieAlgebra {
    /// An abelian algebra with the given strata; fill brackets with [`set_bracket`](Self::set_bracket).
    pub fn new(name: impl Into<String>, strata: Vec<usize>) -> Result<Self> {
        if strata.is_empty() || strata.contains(&0) {
            return Err(CarnotError::InvalidAlgebra(format!(
                "strata must be positive, got {strata:?}"
            )));
        }
        let mut offsets = Vec::with_capacity(strata.len() + 1);
        let mut acc = 0;
        for d in &strata {
            offsets.push(acc);
            acc += d;
        }
        offsets.push(acc);
        if acc > 63 {
            return Err(CarnotError::InvalidAlgebra(format!("dimension {acc} exceeds 63")));
        }
        Ok(StratifiedLieAlgebra {
            name: name.into(),
            strata,
            offsets,
            brackets: BTreeMap::new(),
            conflicts: Vec::new(),
        })
    }

    /// Records `[e_a, e_b] = value` (dense coordinates). Setting both orders
    /// inconsistently, or a nonzero `[e_a, e_a]`, is kept as an antisymmetry
    /// defect for [`validate`](Self::validate) to report.
    pub fn set_bracket(&mut self, a: usize, b: usize, value: &[Q]) -> Result<()> {
        let n = self.dim();
        if a >= n || b >= n {
            return Err(CarnotError::IndexOutOfRange(format!("bracket ({a},{b}) in dim {n}")));
        }
        if value.len() != n {
            return Err(CarnotError::DimensionMismatch { expected: n, got: value.len() });
        }
        let sparse: Vec<(usize, Q)> = value
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i, c.clone()))
            .collect();
        if a == b {
            if !sparse.is_empty() {
                self.conflicts.push(format!(
                    "[{}, {}] is nonzero",
                    self.basis_index(a),
                    self.basis_index(a)
                ));
            }
            return Ok(());
        }
        let (key, stored) = if a < b {
            ((a, b), sparse)
        } else {
            ((b, a), sparse.into_iter().map(|(i, c)| (i, -c)).collect())
        };
        if let Some(prev) = self.brackets.get(&key) {
            if *prev != stored {
                self.conflicts.push(format!(
                    "[{}, {}] and [{}, {}] are not negatives of each other",
                    self.basis_index(key.0),
                    self.basis_index(key.1),
                    self.basis_index(key.1),
                    self.basis_index(key.0)
                ));
            }
            return Ok(());
        }
        if !stored.is_empty() {
            self.brackets.insert(key, stored);
        }
        Ok(())
    }

    /// Sets a single structure constant `c^target_{a,b}` (overwriting), keeping `[b,a] = -[a,b]`.
    pub fn set_structure_constant(&mut self, a: usize, b: usize, target: usize, c: Q) {
        assert!(a != b, "diagonal brackets are always zero");
        let (key, c) = if a < b { ((a, b), c) } else { ((b, a), -c) };
        let entry = self.brackets.entry(key).or_default();
        entry.retain(|(i, _)| *i != target);
        if !c.is_zero() {
            entry.push((target, c));
            entry.sort_by_key(|(i, _)| *i);
        }
        if entry.is_empty() {
            self.brackets.remove(&key);
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn strata(&self) -> &[usize] {
        &self.strata
    }

    /// Topological dimension `n = Σ d_l`.
    pub fn dim(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    /// Step `s`.
    pub fn step(&self) -> usize {
        self.strata.len()
    }

    /// `ν = Σ l·d_l`.
    pub fn homogeneous_dimension(&self) -> usize {
        self.strata.iter().enumerate().map(|(i, d)| (i + 1) * d).sum()
    }

    pub fn layer_of(&self, a: usize) -> usize {
        self.basis_index(a).layer
    }

    pub fn basis_index(&self, a: usize) -> BasisIndex {
        let layer = self.offsets.iter().rposition(|&o| o <= a).unwrap();
        BasisIndex::new(layer + 1, a - self.offsets[layer] + 1)
    }

    pub fn index(&self, idx: BasisIndex) -> Result<usize> {
        if idx.layer == 0 || idx.layer > self.step() || idx.slot == 0 || idx.slot > self.strata[idx.layer - 1] {
            return Err(CarnotError::IndexOutOfRange(format!("{idx} in strata {:?}", self.strata)));
        }
        Ok(self.offsets[idx.layer - 1] + idx.slot - 1)
    }

    /// Global indices of layer `l` (1-based).
    pub fn layer_range(&self, l: usize) -> std::ops::Range<usize> {
        self.offsets[l - 1]..self.offsets[l]
    }

    /// Layer of every coordinate; these are the weighted degrees of `x_a`.
    pub fn weights(&self) -> Vec<u32> {
        (0..self.dim()).map(|a| self.layer_of(a) as u32).collect()
    }

    /// `[e_a, e_b]` as sparse coordinates.
    pub fn bracket_basis(&self, a: usize, b: usize) -> Vec<(usize, Q)> {
        match a.cmp(&b) {
            std::cmp::Ordering::Equal => Vec::new(),
            std::cmp::Ordering::Less => self.brackets.get(&(a, b)).cloned().unwrap_or_default(),
            std::cmp::Ordering::Greater => self
                .brackets
                .get(&(b, a))
                .map(|v| v.iter().map(|(i, c)| (*i, -c.clone())).collect())
                .unwrap_or_default(),
        }
    }

    /// Structure constant `c^k_{ab}` with `[e_a, e_b] = Σ_k c^k_{ab} e_k`.
    pub fn structure_constant(&self, a: usize, b: usize, k: usize) -> Q {
        self.bracket_basis(a, b)
            .into_iter()
            .find(|(i, _)| *i == k)
            .map_or_else(Q::zero, |(_, c)| c)
    }

    /// The layer-(l,1) constants `α^{l,1,k}_{v,j}` with
    /// `[X_{l,v}, X_{1,j}] = Σ_k α X_{l+1,k}`.
    pub fn alpha(&self, l: usize, v: usize, j: usize, k: usize) -> Q {
        let a = self.offsets[l - 1] + v - 1;
        let b = j - 1;
        let c = self.offsets[l] + k - 1;
        self.structure_constant(a, b, c)
    }

    /// Stored pairs `a < b` with nonzero bracket.
    pub fn nonzero_brackets(&self) -> impl Iterator<Item = (&(usize, usize), &Vec<(usize, Q)>)> {
        self.brackets.iter()
    }

    /// Bilinear extension of the structure constants to any coefficient ring.
    pub fn bracket_generic<R: crate::rational::Ring>(&self, x: &[R], y: &[R]) -> Vec<R> {
        let n = self.dim();
        let mut out = vec![R::zero(); n];
        for (&(a, b), targets) in &self.brackets {
            let (xa, xb, ya, yb) = (&x[a], &x[b], &y[a], &y[b]);
            if (xa.is_zero() || yb.is_zero()) && (xb.is_zero() || ya.is_zero()) {
                continue;
            }
            let w = xa.mul(yb).sub(&xb.mul(ya));
            if w.is_zero() {
                continue;
            }
            for (k, c) in targets {
                out[*k].add_assign(&w.scale_q(c));
            }
        }
        out
    }

    pub fn bracket(&self, x: &AlgebraVector, y: &AlgebraVector) -> Result<AlgebraVector> {
        self.check_dim(x.dim())?;
        self.check_dim(y.dim())?;
        Ok(AlgebraVector(self.bracket_generic(&x.0, &y.0)))
    }

    pub fn bracket_f64(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        self.bracket_generic(x, y)
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dim() {
            return Err(CarnotError::DimensionMismatch { expected: self.dim(), got });
        }
        Ok(())
    }

    /// `δ_t`: scales layer-`l` coordinates by `t^l`.
    pub fn dilate_algebra(&self, t: &Q, x: &AlgebraVector) -> Result<AlgebraVector> {
        if *t <= Q::zero() {
            return Err(CarnotError::NonPositiveScale(crate::rational::q_to_f64(t)));
        }
        self.check_dim(x.dim())?;
        Ok(AlgebraVector(
            x.0.iter()
                .enumerate()
                .map(|(a, c)| c * num_traits::pow(t.clone(), self.layer_of(a)))
                .collect(),
        ))
    }

    pub fn dilate_f64(&self, t: f64, x: &[f64]) -> Result<Vec<f64>> {
        if t <= 0.0 {
            return Err(CarnotError::NonPositiveScale(t));
        }
        self.check_dim(x.len())?;
        Ok(x.iter()
            .enumerate()
            .map(|(a, c)| c * t.powi(self.layer_of(a) as i32))
            .collect())
    }

    /// Checks antisymmetry, grading, the Jacobi identity and generation by layer 1.
    pub fn validate(&self) -> ValidationReport {
        let mut checks = Vec::new();

        checks.push(match self.conflicts.first() {
            None => Check::pass("antisymmetry"),
            Some(c) => Check::fail("antisymmetry", c.clone()),
        });

        let mut grading = Check::pass("grading");
        'grading: for (&(a, b), targets) in &self.brackets {
            let want = self.layer_of(a) + self.layer_of(b);
            for (k, _) in targets {
                if want > self.step() || self.layer_of(*k) != want {
                    grading = Check::fail(
                        "grading",
                        format!(
                            "[{}, {}] has a component along {} (expected layer {})",
                            self.basis_index(a),
                            self.basis_index(b),
                            self.basis_index(*k),
                            want
                        ),
                    );
                    break 'grading;
                }
            }
        }
        checks.push(grading);

        checks.push(match self.first_jacobi_violation() {
            None => Check::pass("jacobi"),
            Some((a, b, c)) => Check::fail(
                "jacobi",
                format!(
                    "triple {}, {}, {}",
                    self.basis_index(a),
                    self.basis_index(b),
                    self.basis_index(c)
                ),
            ),
        });

        let mut generation = Check::pass("generation");
        for l in 1..self.step() {
            let rank = self.generated_rank(l);
            if rank != self.strata[l] {
                generation = Check::fail(
                    "generation",
                    format!(
                        "[g_1, g_{l}] has rank {rank} in layer {} of dimension {}",
                        l + 1,
                        self.strata[l]
                    ),
                );
                break;
            }
        }
        checks.push(generation);

        ValidationReport { algebra: self.name.clone(), checks }
    }

    /// Jacobi sum for a basis triple.
    pub fn jacobi_sum(&self, a: usize, b: usize, c: usize) -> Vec<Q> {
        let n = self.dim();
        let e = |i: usize| AlgebraVector::basis(n, i).0;
        let br = |x: &[Q], y: &[Q]| self.bracket_generic(x, y);
        let t1 = br(&e(a), &br(&e(b), &e(c)));
        let t2 = br(&e(b), &br(&e(c), &e(a)));
        let t3 = br(&e(c), &br(&e(a), &e(b)));
        (0..n).map(|k| &t1[k] + &t2[k] + &t3[k]).collect()
    }

    /// First triple `a < b < c` (lexicographic) whose Jacobi sum is nonzero.
    pub fn first_jacobi_violation(&self) -> Option<(usize, usize, usize)> {
        let n = self.dim();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    if self.jacobi_sum(a, b, c).iter().any(|x| !x.is_zero()) {
                        return Some((a, b, c));
                    }
                }
            }
        }
        None
    }

    /// Rank of `span{[X_{1,j}, X_{l,v}]}` projected to layer `l+1`.
    pub fn generated_rank(&self, l: usize) -> usize {
        let target = self.layer_range(l + 1);
        let mut rows = Vec::new();
        for j in self.layer_range(1) {
            for v in self.layer_range(l) {
                let mut row = vec![Q::zero(); target.len()];
                for (k, c) in self.bracket_basis(j, v) {
                    if target.contains(&k) {
                        row[k - target.start] = c;
                    }
                }
                rows.push(row);
            }
        }
        linalg::rank(target.len(), &rows)
    }

    /// True when the linear map `e_a ↦ Σ_b m[a][b] e_b` intertwines the brackets of `self` and `other`.
    pub fn is_homomorphism(&self, other: &StratifiedLieAlgebra, m: &[Vec<Q>]) -> bool {
        let n = self.dim();
        if other.dim() != n || m.len() != n {
            return false;
        }
        let apply = |x: &[Q]| -> Vec<Q> {
            let mut out = vec![Q::zero(); n];
            for a in 0..n {
                if x[a].is_zero() {
                    continue;
                }
                for b in 0..n {
                    out[b] += &x[a] * &m[a][b];
                }
            }
            out
        };
        for a in 0..n {
            for b in a + 1..n {
                let ea = AlgebraVector::basis(n, a).0;
                let eb = AlgebraVector::basis(n, b).0;
                let lhs = apply(&self.bracket_generic(&ea, &eb));
                let rhs = other.bracket_generic(&apply(&ea), &apply(&eb));
                if lhs != rhs {
                    return false;
                }
            }
        }
        true
    }

    pub fn describe(&self) -> String {
        let mut s = format!("{} strata={:?} n={} nu={}\n", self.name, self.strata, self.dim(), self.homogeneous_dimension());
        for (&(a, b), t) in &self.brackets {
            let rhs: Vec<String> = t
                .iter()
                .map(|(k, c)| format!("{}*{}", fmt_q(c), self.basis_index(*k)))
                .collect();
            s.push_str(&format!("  [{}, {}] = {}\n", self.basis_index(a), self.basis_index(b), rhs.join(" + ")));
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: Option<String>,
}

impl Check {
    fn pass(name: &'static str) -> Self {
        Check { name, passed: true, detail: None }
    }
    fn fail(name: &'static str, detail: String) -> Self {
        Check { name, passed: false, detail: Some(detail) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub algebra: String,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "validation of {}", self.algebra)?;
        for c in &self.checks {
            let status = if c.passed { "pass" } else { "FAIL" };
            match &c.detail {
                Some(d) => writeln!(f, "  {:<13} {status}  {d}", c.name)?,
                None => writeln!(f, "  {:<13} {status}", c.name)?,
            }
        }
        Ok(())
    }
}

/// Dense bracket value helper for table construction: `Σ coeff·e_target`.
pub(crate) fn dense(n: usize, entries: &[(usize, i64)]) -> Vec<Q> {
    let mut v = vec![Q::zero(); n];
    for &(k, c) in entries {
        v[k] = q_int(c);
    }
    v
}
