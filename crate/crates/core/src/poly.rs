//! Sparse multivariate polynomials.
//!
//! Monomials are stored sparsely as sorted `(variable, exponent)` pairs, so a
//! polynomial never needs to know how many variables exist. This lets the same
//! type carry coordinate expressions on `G` (n variables), the group law on
//! `G × G` (2n variables), and parametrized families without reindexing.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use smallvec::SmallVec;

use crate::rational::{fmt_q, Ring, Scalar, Q};

/// A monomial `∏ x_v^e`, stored as sorted `(v, e)` pairs with `e > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(pub SmallVec<[(u16, u16); 4]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn var(v: usize) -> Self {
        let mut m = SmallVec::new();
        m.push((v as u16, 1));
        Monomial(m)
    }

    /// Builds a monomial from a dense exponent vector.
    pub fn from_exponents(exps: &[u32]) -> Self {
        Monomial(
            exps.iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(v, &e)| (v as u16, e as u16))
                .collect(),
        )
    }

    pub fn exponents(&self, nvars: usize) -> Vec<u32> {
        let mut out = vec![0; nvars];
        for &(v, e) in &self.0 {
            out[v as usize] = e as u32;
        }
        out
    }

    pub fn exponent(&self, var: usize) -> u32 {
        self.0
            .iter()
            .find(|(v, _)| *v as usize == var)
            .map_or(0, |(_, e)| *e as u32)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| *e as u32).sum()
    }

    /// `Σ weight(v)·e_v`; variables past the end of `weights` count with weight 1.
    pub fn weighted_degree(&self, weights: &[u32]) -> u32 {
        self.0
            .iter()
            .map(|&(v, e)| weights.get(v as usize).copied().unwrap_or(1) * e as u32)
            .sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// Derivative with respect to `var`: returns the exponent and the reduced monomial.
    pub fn deriv(&self, var: usize) -> Option<(u32, Monomial)> {
        let pos = self.0.iter().position(|(v, _)| *v as usize == var)?;
        let e = self.0[pos].1;
        let mut out = self.0.clone();
        if e == 1 {
            out.remove(pos);
        } else {
            out[pos].1 -= 1;
        }
        Some((e as u32, Monomial(out)))
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.0
            .iter()
            .map(|&(v, e)| x[v as usize].powi(e as i32))
            .product()
    }

    pub fn max_var(&self) -> Option<usize> {
        self.0.last().map(|(v, _)| *v as usize)
    }

    /// Renames variables; `map` must be injective on the variables present.
    pub fn rename(&self, map: impl Fn(usize) -> usize) -> Monomial {
        let mut pairs: SmallVec<[(u16, u16); 4]> =
            self.0.iter().map(|&(v, e)| (map(v as usize) as u16, e)).collect();
        pairs.sort_unstable();
        Monomial(pairs)
    }

    pub fn fmt_with(&self, names: &dyn Fn(usize) -> String) -> String {
        self.0
            .iter()
            .map(|&(v, e)| {
                if e == 1 {
                    names(v as usize)
                } else {
                    format!("{}^{}", names(v as usize), e)
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }
}

/// Sparse polynomial with coefficients in `C`.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<C: Scalar> {
    terms: BTreeMap<Monomial, C>,
}

/// Exact polynomial with rational coefficients.
pub type Polynomial = Poly<Q>;

impl<C: Scalar> Default for Poly<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Scalar> Poly<C> {
    pub fn zero() -> Self {
        Poly { terms: BTreeMap::new() }
    }

    pub fn constant(c: C) -> Self {
        Self::term(Monomial::one(), c)
    }

    pub fn var(v: usize) -> Self {
        Self::term(Monomial::var(v), C::one())
    }

    pub fn term(m: Monomial, c: C) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn from_terms(iter: impl IntoIterator<Item = (Monomial, C)>) -> Self {
        let mut p = Self::zero();
        for (m, c) in iter {
            p.add_term(m, &c);
        }
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn constant_term(&self) -> C {
        self.coeff(&Monomial::one())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn add_term(&mut self, m: Monomial, c: &C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                existing.add_assign(c);
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Self, s: &C) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), &c.mul(s));
        }
    }

    pub fn scale(&self, s: &C) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.mul(s)))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, s: &C) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, c)| (k.mul(m), c.mul(s))))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::constant(C::one());
        for _ in 0..e {
            out = Ring::mul(&out, self);
        }
        out
    }

    pub fn deriv(&self, var: usize) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            if let Some((e, rest)) = m.deriv(var) {
                out.add_term(rest, &c.mul(&C::from_i64(e as i64)));
            }
        }
        out
    }

    /// Exact evaluation.
    pub fn eval(&self, x: &[C]) -> C {
        let mut acc = C::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in &m.0 {
                for _ in 0..e {
                    t = t.mul(&x[v as usize]);
                }
            }
            acc.add_assign(&t);
        }
        acc
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| c.to_f64() * m.eval_f64(x))
            .sum()
    }

    /// Substitutes `subs[v]` for variable `v` (variables beyond `subs` are kept).
    pub fn compose(&self, subs: &[Poly<C>]) -> Self {
        let mut cache: BTreeMap<(u16, u16), Poly<C>> = BTreeMap::new();
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut t = Self::constant(c.clone());
            for &(v, e) in &m.0 {
                let factor = if (v as usize) < subs.len() {
                    cache
                        .entry((v, e))
                        .or_insert_with(|| subs[v as usize].pow(e as u32))
                        .clone()
                } else {
                    Self::term(Monomial(SmallVec::from_slice(&[(v, e)])), C::one())
                };
                t = Ring::mul(&t, &factor);
            }
            out.add_scaled(&t, &C::one());
        }
        out
    }

    /// Substitutes numeric values for the listed variables, keeping the rest symbolic.
    pub fn eval_partial(&self, values: &[(usize, C)]) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut rest: SmallVec<[(u16, u16); 4]> = SmallVec::new();
            for &(v, e) in &m.0 {
                match values.iter().find(|(var, _)| *var == v as usize) {
                    Some((_, val)) => {
                        for _ in 0..e {
                            coeff = coeff.mul(val);
                        }
                    }
                    None => rest.push((v, e)),
                }
            }
            out.add_term(Monomial(rest), &coeff);
        }
        out
    }

    pub fn rename_vars(&self, map: impl Fn(usize) -> usize) -> Self {
        Self::from_terms(self.terms.iter().map(|(m, c)| (m.rename(&map), c.clone())))
    }

    pub fn map_coeffs<D: Scalar>(&self, f: impl Fn(&C) -> D) -> Poly<D> {
        Poly::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    pub fn to_f64(&self) -> Poly<f64> {
        self.map_coeffs(|c| c.to_f64())
    }

    pub fn max_var(&self) -> Option<usize> {
        self.terms.keys().filter_map(Monomial::max_var).max()
    }

    /// Largest weighted degree of a term, `None` for the zero polynomial.
    pub fn weighted_degree(&self, weights: &[u32]) -> Option<u32> {
        self.terms.keys().map(|m| m.weighted_degree(weights)).max()
    }

    pub fn min_weighted_degree(&self, weights: &[u32]) -> Option<u32> {
        self.terms.keys().map(|m| m.weighted_degree(weights)).min()
    }

    pub fn is_homogeneous(&self, weights: &[u32]) -> bool {
        self.weighted_degree(weights) == self.min_weighted_degree(weights)
    }

    pub fn homogeneous_part(&self, weights: &[u32], degree: u32) -> Self {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.weighted_degree(weights) == degree)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Largest coefficient magnitude.
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.to_f64().abs()).fold(0.0, f64::max)
    }

    /// Terms sorted by the graded order: weighted degree descending, then lex.
    pub fn sorted_terms(&self, weights: &[u32]) -> Vec<(&Monomial, &C)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| {
            b.0.weighted_degree(weights)
                .cmp(&a.0.weighted_degree(weights))
                .then_with(|| b.0.cmp(a.0))
        });
        v
    }

    pub fn compile(&self) -> CompiledPoly {
        CompiledPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (c.to_f64(), m.0.clone()))
                .collect(),
        }
    }
}

impl<C: Scalar> Ring for Poly<C> {
    fn zero() -> Self {
        Poly::zero()
    }
    fn one() -> Self {
        Poly::constant(C::one())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &C::one());
        out
    }
    fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &C::one().neg());
        out
    }
    fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), &ca.mul(cb));
            }
        }
        out
    }
    fn neg(&self) -> Self {
        self.scale(&C::one().neg())
    }
    fn from_q(q: &Q) -> Self {
        Poly::constant(C::from_q(q))
    }
    fn add_assign(&mut self, other: &Self) {
        self.add_scaled(other, &C::one());
    }
    fn scale_q(&self, q: &Q) -> Self {
        self.scale(&C::from_q(q))
    }
}

impl<C: Scalar> std::ops::Add for &Poly<C> {
    type Output = Poly<C>;
    fn add(self, rhs: Self) -> Poly<C> {
        Ring::add(self, rhs)
    }
}

impl<C: Scalar> std::ops::Sub for &Poly<C> {
    type Output = Poly<C>;
    fn sub(self, rhs: Self) -> Poly<C> {
        Ring::sub(self, rhs)
    }
}

impl<C: Scalar> std::ops::Mul for &Poly<C> {
    type Output = Poly<C>;
    fn mul(self, rhs: Self) -> Poly<C> {
        Ring::mul(self, rhs)
    }
}

impl<C: Scalar> std::ops::Neg for &Poly<C> {
    type Output = Poly<C>;
    fn neg(self) -> Poly<C> {
        Ring::neg(self)
    }
}

impl<C: Scalar> std::ops::AddAssign<&Poly<C>> for Poly<C> {
    fn add_assign(&mut self, rhs: &Poly<C>) {
        self.add_scaled(rhs, &C::one());
    }
}

impl<C: Scalar> std::ops::SubAssign<&Poly<C>> for Poly<C> {
    fn sub_assign(&mut self, rhs: &Poly<C>) {
        self.add_scaled(rhs, &C::one().neg());
    }
}

/// Flat `f64` form of a polynomial for hot evaluation loops.
#[derive(Clone, Debug, Default)]
pub struct CompiledPoly {
    terms: Vec<(f64, SmallVec<[(u16, u16); 4]>)>,
}

impl CompiledPoly {
    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (c, m) in &self.terms {
            let mut t = *c;
            for &(v, e) in m {
                let xv = x[v as usize];
                t *= match e {
                    1 => xv,
                    2 => xv * xv,
                    _ => xv.powi(e as i32),
                };
            }
            acc += t;
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Default coordinate names `x1, x2, …`.
pub fn coord_name(v: usize) -> String {
    format!("x{}", v + 1)
}

impl Poly<Q> {
    /// Human-readable rendering, e.g. `x3 + 1/2*x1*x2`.
    pub fn fmt_named(&self, weights: &[u32], names: &dyn Fn(usize) -> String) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.sorted_terms(weights).into_iter().enumerate() {
            let neg = c < &Q::zero();
            let mag = if neg { -c.clone() } else { c.clone() };
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let one = mag == Q::one();
            match (m.is_one(), one) {
                (true, _) => out.push_str(&fmt_q(&mag)),
                (false, true) => out.push_str(&m.fmt_with(names)),
                (false, false) => {
                    out.push_str(&fmt_q(&mag));
                    out.push('*');
                    out.push_str(&m.fmt_with(names));
                }
            }
        }
        out
    }
}

impl fmt::Display for Poly<Q> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fmt_named(&[], &coord_name))
    }
}

impl fmt::Display for Poly<f64> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms()
            .map(|(m, c)| {
                if m.is_one() {
                    format!("{c:.6e}")
                } else {
                    format!("{c:.6e}*{}", m.fmt_with(&coord_name))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Parses polynomial expressions such as `x3 + 1/2*x1*x2 - x2^2`.
///
/// Variables are `x1..xN` (1-based). Only sums of products of rational
/// constants and variable powers are accepted.
pub fn parse_polynomial(text: &str) -> crate::error::Result<Polynomial> {
    use crate::error::CarnotError;
    use crate::rational::parse_q;

    let bad = |why: &str| CarnotError::Parse(format!("polynomial `{text}`: {why}"));
    let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if cleaned.is_empty() {
        return Err(bad("empty"));
    }
    // Split into signed terms.
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut current = String::new();
    let mut negative = false;
    for (i, ch) in cleaned.chars().enumerate() {
        if (ch == '+' || ch == '-') && i > 0 && !current.is_empty() && !current.ends_with('^') {
            terms.push((negative, std::mem::take(&mut current)));
            negative = ch == '-';
        } else if (ch == '+' || ch == '-') && current.is_empty() {
            if ch == '-' {
                negative = !negative;
            }
        } else {
            current.push(ch);
        }
    }
    if current.is_empty() {
        return Err(bad("dangling sign"));
    }
    terms.push((negative, current));

    let mut out = Polynomial::zero();
    for (neg, body) in terms {
        let mut coeff = Q::one();
        let mut mono = Monomial::one();
        for factor in body.split('*') {
            if factor.is_empty() {
                return Err(bad("empty factor"));
            }
            if let Some(rest) = factor.strip_prefix('x') {
                let (idx, exp) = match rest.split_once('^') {
                    Some((i, e)) => (i, e.parse::<u32>().map_err(|_| bad("bad exponent"))?),
                    None => (rest, 1),
                };
                let idx: usize = idx.parse().map_err(|_| bad("bad variable index"))?;
                if idx == 0 {
                    return Err(bad("variables are 1-based"));
                }
                let mut exps = vec![0u32; idx];
                exps[idx - 1] = exp;
                mono = mono.mul(&Monomial::from_exponents(&exps));
            } else {
                coeff *= parse_q(factor)?;
            }
        }
        if neg {
            coeff = -coeff;
        }
        out.add_term(mono, &coeff);
    }
    Ok(out)
}
