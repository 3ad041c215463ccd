//! One-dimensional quadrature rules and their tensor products.
//!
//! Three rules are provided:
//! * Gauss–Legendre on `[-1, 1]`, exact for polynomials of degree `2m − 1`;
//! * a double-exponential (tanh-sinh) integrator for smooth integrands with
//!   endpoint decay;
//! * a Gauss rule adapted to the bump `b(t) = exp(−1/(1−t²))`. It is the
//!   Gaussian rule for the weight `w = b/(1−t²)²`, returned with plain
//!   weights so that `Σ ω_k g(u_k)` is exact for `g = b·p` with
//!   `deg p ≤ 2m − 5` and for `g = b'·p` with `deg p ≤ 2m − 2`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use nalgebra::{DMatrix, SymmetricEigen};

/// Nodes and weights of a one-dimensional rule.
#[derive(Clone, Debug, PartialEq)]
pub struct Rule1d {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule1d {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Affine image of a rule on `[-1, 1]` onto `[lo, hi]`.
    pub fn mapped(&self, lo: f64, hi: f64) -> Rule1d {
        let (c, h) = ((lo + hi) / 2.0, (hi - lo) / 2.0);
        Rule1d {
            nodes: self.nodes.iter().map(|t| c + h * t).collect(),
            weights: self.weights.iter().map(|w| w * h).collect(),
        }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(*x)).sum()
    }
}

/// Legendre polynomial `P_m(x)` and its derivative.
fn legendre(m: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Gauss–Legendre rule with `m` nodes on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(m: usize) -> Rule1d {
    assert!(m >= 1, "rule needs at least one node");
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(m, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(m, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    Rule1d { nodes, weights }
}

/// Double-exponential rule on `[-1, 1]`: `t = tanh(π/2 · sinh s)`, trapezoid in `s`.
pub fn tanh_sinh(h: f64, s_max: f64) -> Rule1d {
    let k_max = (s_max / h).ceil() as i64;
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for k in -k_max..=k_max {
        let s = k as f64 * h;
        let u = PI / 2.0 * s.sinh();
        let t = u.tanh();
        let w = h * PI / 2.0 * s.cosh() / (u.cosh() * u.cosh());
        if w < 1e-300 || t.abs() >= 1.0 {
            continue;
        }
        nodes.push(t);
        weights.push(w);
    }
    Rule1d { nodes, weights }
}

/// Integrates `f` over `[a, b]` by tanh-sinh, halving the step until two
/// successive levels agree to `tol` (relative to the magnitude).
pub fn integrate_de(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let mut h = 0.5;
    let mut prev = tanh_sinh(h, 4.0).mapped(a, b).integrate(&f);
    for _ in 0..8 {
        h /= 2.0;
        let cur = tanh_sinh(h, 4.0).mapped(a, b).integrate(&f);
        if (cur - prev).abs() <= tol * cur.abs().max(1e-300) {
            return cur;
        }
        prev = cur;
    }
    prev
}

/// The bump `b(t) = exp(−1/(1−t²))` on `(−1, 1)`, zero elsewhere.
#[inline]
pub fn bump(t: f64) -> f64 {
    let d = 1.0 - t * t;
    if d <= 0.0 {
        0.0
    } else {
        (-1.0 / d).exp()
    }
}

/// `b'(t) = −2t/(1−t²)² · b(t)`.
#[inline]
pub fn bump_deriv(t: f64) -> f64 {
    let d = 1.0 - t * t;
    if d <= 0.0 {
        0.0
    } else {
        -2.0 * t / (d * d) * (-1.0 / d).exp()
    }
}

/// The Gauss weight `w(t) = b(t)/(1−t²)²`.
#[inline]
fn bump_weight(t: f64) -> f64 {
    let d = 1.0 - t * t;
    if d <= 0.0 {
        0.0
    } else {
        (-1.0 / d).exp() / (d * d)
    }
}

/// Fine discretization of the weight `w` used by the Stieltjes procedure.
fn discretized_weight() -> &'static (Vec<f64>, Vec<f64>) {
    static CELL: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    CELL.get_or_init(|| {
        let r = tanh_sinh(1.0 / 256.0, 3.5);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for (t, w) in r.nodes.iter().zip(&r.weights) {
            let v = w * bump_weight(*t);
            if v > 0.0 {
                nodes.push(*t);
                weights.push(v);
            }
        }
        (nodes, weights)
    })
}

/// Gauss rule for the bump weight with `m` nodes, returned with plain
/// weights (see the module docs). Results are cached per order.
pub fn bump_rule(m: usize) -> Rule1d {
    static CACHE: OnceLock<Mutex<HashMap<usize, Rule1d>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = cache.lock().unwrap().get(&m) {
        return r.clone();
    }
    let rule = build_bump_rule(m);
    cache.lock().unwrap().insert(m, rule.clone());
    rule
}

fn build_bump_rule(m: usize) -> Rule1d {
    assert!((1..=60).contains(&m), "bump rule order must be in 1..=60");
    let (x, w) = discretized_weight();
    // Stieltjes: three-term recurrence of the monic orthogonal polynomials.
    let mut alpha = vec![0.0; m];
    let mut beta = vec![0.0; m];
    let mut p_prev = vec![0.0; x.len()];
    let mut p = vec![1.0; x.len()];
    let mut norm_prev = 1.0;
    for k in 0..m {
        let norm: f64 = p.iter().zip(w).map(|(pi, wi)| wi * pi * pi).sum();
        let xn: f64 = p.iter().zip(w).zip(x).map(|((pi, wi), xi)| wi * xi * pi * pi).sum();
        alpha[k] = xn / norm;
        beta[k] = if k == 0 { norm } else { norm / norm_prev };
        let next: Vec<f64> = (0..x.len())
            .map(|i| (x[i] - alpha[k]) * p[i] - if k == 0 { 0.0 } else { beta[k] * p_prev[i] })
            .collect();
        p_prev = std::mem::replace(&mut p, next);
        norm_prev = norm;
    }
    // Golub–Welsch.
    let mut jac = DMatrix::<f64>::zeros(m, m);
    for k in 0..m {
        jac[(k, k)] = alpha[k];
        if k + 1 < m {
            let off = beta[k + 1].sqrt();
            jac[(k, k + 1)] = off;
            jac[(k + 1, k)] = off;
        }
    }
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..m)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            let u = eig.eigenvalues[i];
            (u, beta[0] * v0 * v0 / bump_weight(u))
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    // Symmetrize: the weight is even.
    for i in 0..m / 2 {
        let j = m - 1 - i;
        let u = (pairs[j].0 - pairs[i].0) / 2.0;
        let wt = (pairs[i].1 + pairs[j].1) / 2.0;
        pairs[i] = (-u, wt);
        pairs[j] = (u, wt);
    }
    if m % 2 == 1 {
        pairs[m / 2].0 = 0.0;
    }
    Rule1d { nodes: pairs.iter().map(|p| p.0).collect(), weights: pairs.iter().map(|p| p.1).collect() }
}

/// `∫_{-1}^{1} t^k b(t) dt`, cached.
pub fn bump_moment(k: usize) -> f64 {
    static CACHE: OnceLock<Mutex<HashMap<usize, f64>>> = OnceLock::new();
    if k % 2 == 1 {
        return 0.0;
    }
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&k) {
        return *v;
    }
    let (x, w) = discretized_weight();
    let v: f64 = x
        .iter()
        .zip(w)
        .map(|(t, wt)| {
            let d = 1.0 - t * t;
            wt * d * d * t.powi(k as i32)
        })
        .sum();
    cache.lock().unwrap().insert(k, v);
    v
}

/// Tensor product of one-dimensional rules over a box.
#[derive(Clone, Debug)]
pub struct TensorGrid {
    pub axes: Vec<Rule1d>,
}

impl TensorGrid {
    /// Gauss–Legendre grid of order `m` per axis on the box `lo..hi`.
    pub fn gauss_box(lo: &[f64], hi: &[f64], m: usize) -> Self {
        let base = gauss_legendre(m);
        TensorGrid { axes: lo.iter().zip(hi).map(|(a, b)| base.mapped(*a, *b)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(Rule1d::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Visits every node with its product weight, in lexicographic order
    /// (last axis fastest).
    pub fn for_each(&self, mut f: impl FnMut(&[f64], f64)) {
        let n = self.dim();
        if n == 0 || self.is_empty() {
            return;
        }
        let mut idx = vec![0usize; n];
        let mut x: Vec<f64> = self.axes.iter().map(|a| a.nodes[0]).collect();
        loop {
            let w: f64 = (0..n).map(|a| self.axes[a].weights[idx[a]]).product();
            f(&x, w);
            let mut a = n;
            loop {
                if a == 0 {
                    return;
                }
                a -= 1;
                idx[a] += 1;
                if idx[a] < self.axes[a].len() {
                    x[a] = self.axes[a].nodes[idx[a]];
                    break;
                }
                idx[a] = 0;
                x[a] = self.axes[a].nodes[0];
            }
        }
    }

    pub fn integrate(&self, mut f: impl FnMut(&[f64]) -> f64) -> f64 {
        let mut acc = 0.0;
        self.for_each(|x, w| acc += w * f(x));
        acc
    }

    /// All nodes, in [`for_each`](Self::for_each) order.
    pub fn nodes(&self) -> Vec<Vec<f64>> {
        let mut out = Vec::with_capacity(self.len());
        self.for_each(|x, _| out.push(x.to_vec()));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const B0: f64 = 0.443993816168079437823048921171;
    const B2: f64 = 0.0702014767529754099883759076064;
    const B4: f64 = 0.0235235995711447684167916679361;
    const B6: f64 = 0.0102398235135444272909103274877;

    #[test]
    fn gauss_legendre_exactness() {
        for m in [1, 2, 5, 8, 16, 33] {
            let r = gauss_legendre(m);
            for k in 0..2 * m {
                let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k + 1) as f64 };
                let got = r.integrate(|x| x.powi(k as i32));
                assert!((got - exact).abs() < 1e-13, "m={m} k={k} got={got}");
            }
        }
    }

    #[test]
    fn bump_moments_match_reference() {
        for (k, v) in [(0, B0), (2, B2), (4, B4), (6, B6)] {
            assert!((bump_moment(k) - v).abs() < 1e-15, "k={k}: {}", bump_moment(k));
        }
        let de = integrate_de(bump, -1.0, 1.0, 1e-15);
        assert!((de - B0).abs() < 1e-15);
    }

    #[test]
    fn bump_rule_is_exact_on_its_class() {
        for m in [4, 8, 12, 20] {
            let r = bump_rule(m);
            for k in 0..=(2 * m - 5) {
                let got = r.integrate(|t| bump(t) * t.powi(k as i32));
                let want = bump_moment(k);
                assert!((got - want).abs() < 1e-14, "m={m} k={k}");
            }
            // ∫ b' t^{k} = −k ∫ b t^{k−1}
            for k in 1..=(2 * m - 2) {
                let got = r.integrate(|t| bump_deriv(t) * t.powi(k as i32));
                let want = -(k as f64) * bump_moment(k - 1);
                assert!((got - want).abs() < 1e-13, "m={m} k={k}");
            }
        }
    }

    #[test]
    fn tensor_grid_integrates_products() {
        let g = TensorGrid::gauss_box(&[0.0, -1.0, 2.0], &[1.0, 1.0, 3.0], 4);
        assert_eq!(g.len(), 64);
        let v = g.integrate(|x| x[0] * x[1] * x[1] * x[2]);
        assert!((v - 0.5 * (2.0 / 3.0) * 2.5).abs() < 1e-14);
    }
}
