//! The weak contact identity
//!
//! ```text
//! ∫ i_Z(dη) ∧ β − ∫ i_Z(η) ∧ dβ = 0
//! ```
//!
//! for vertical 1-forms `η` and compactly supported `(n−1)`-forms `β` of
//! weight `−ν + 1`, evaluated against test bumps.
//!
//! Test pairs have `η = g·η₀` with `η₀` left-invariant and vertical and `g`
//! an optional polynomial factor, and `β = φ Σ_J q_J σ_J` with polynomial
//! `q_J`. The integrand is trilinear in `Z`, the coefficients of `η` and those
//! of `β`, so the form calculus is carried out once per pair on basis
//! elements and the resulting constant tensors are contracted at every
//! quadrature node.
//!
//! The coordinate form of the identity for the pair `(σ_(l,k), φ σ̂_(1,j))` is
//!
//! ```text
//! ∫ z_(l,k) X_(1,j)φ + Σ_r ∫ z_(l−1,r) α^{l−1,1,k}_{r,j} φ = 0,
//! ```
//!
//! and the two residuals differ exactly by the factor [`orientation_sign`].

use std::fmt;

use crate::bump::{order_for_degree, BumpNodes, TestBump};
use crate::error::{CarnotError, Result};
use crate::exterior::{bits, d_left_invariant, full_mask, is_vertical, weight_of, ConstForm, DxToSigma, FormBasis, NumForm, PolyForm, Weight};
use crate::flows::{horizontal_defect, ContactMap, Pushforward};
use crate::group::{CarnotGroup, LeftPolyField, NumericField, PolyVectorField};
use crate::mollifier::{BumpForm, Mollifier};
use crate::poly::{CompiledPoly, Polynomial};
use crate::rational::{q_int, q_to_f64};

/// A vertical 1-form `η = g η₀` and a bump form `β`.
#[derive(Clone, Debug)]
pub struct TestPair {
    eta: ConstForm,
    factor: Option<Polynomial>,
    beta: BumpForm,
    pub label: String,
}

impl TestPair {
    /// Checks that `η₀` is left-invariant and vertical and that `β` has
    /// degree `n − 1` and weight `−ν + 1`.
    pub fn new(group: &CarnotGroup, eta: &PolyForm, factor: Option<Polynomial>, beta: BumpForm, label: impl Into<String>) -> Result<Self> {
        let n = group.dim();
        let eta = match eta.basis() {
            FormBasis::LeftInvariant => eta.clone(),
            FormBasis::Coordinate => group.to_left_invariant(eta)?,
        };
        if eta.components().any(|(_, c)| !c.is_constant()) {
            return Err(CarnotError::NotLeftInvariant);
        }
        if !is_vertical(group, &eta)? {
            return Err(CarnotError::InvalidPair("η is not vertical".into()));
        }
        if beta.form.degree() + 1 != n {
            return Err(CarnotError::DimensionMismatch { expected: n - 1, got: beta.form.degree() });
        }
        let want = 1 - group.homogeneous_dimension() as i32;
        match weight_of(group, &beta.form)? {
            Weight::Homogeneous(w) if w == want => {}
            w => return Err(CarnotError::InvalidPair(format!("β has weight {w}, expected {want}"))),
        }
        let eta = eta.map_ring(|c| c.constant_term());
        Ok(TestPair { eta, factor, beta, label: label.into() })
    }

    /// `(σ_t, φ σ̂_j)` for a basis index `t` of layer `≥ 2` and a horizontal
    /// index `j` (both 0-based).
    pub fn standard(group: &CarnotGroup, t: usize, j: usize, bump: TestBump) -> Result<Self> {
        let alg = group.algebra();
        let d1 = alg.strata()[0];
        if t < d1 || t >= group.dim() || j >= d1 {
            return Err(CarnotError::IndexOutOfRange(format!("pair (σ_{}, σ̂_{})", t + 1, j + 1)));
        }
        let label = format!("eta=sigma{} beta=phi*sigmahat{} c={:?} r={}", alg.basis_index(t), alg.basis_index(j), bump.center, bump.radius);
        let beta = BumpForm::new(group, bump, &group.sigma_hat(j))?;
        Self::new(group, &group.sigma(&[t]), None, beta, label)
    }

    pub fn with_factor(mut self, g: Polynomial) -> Self {
        self.factor = Some(g);
        self
    }

    pub fn bump(&self) -> &TestBump {
        &self.beta.bump
    }

    pub fn beta(&self) -> &BumpForm {
        &self.beta
    }

    pub fn eta(&self) -> &ConstForm {
        &self.eta
    }

    pub fn factor(&self) -> Option<&Polynomial> {
        self.factor.as_ref()
    }

    /// Weighted degree of the polynomial parts, for choosing a rule order.
    pub fn degree(&self, group: &CarnotGroup) -> u32 {
        let w = group.weights();
        let q = self.beta.form.components().filter_map(|(_, c)| c.weighted_degree(w)).max().unwrap_or(0);
        q + self.factor.as_ref().and_then(|g| g.weighted_degree(w)).unwrap_or(0)
    }
}

/// Constant tensors of one pair, in the left-invariant coframe.
struct PairTensors {
    /// `z_a (X_b g) b_J`: top coefficient of `i_{e_a}(σ_b ∧ η₀) ∧ σ_J`.
    dg_terms: Vec<(f64, usize, usize, usize)>,
    /// `z_a g b_J`: `i_{e_a}(dη₀) ∧ σ_J − i_{e_a}(η₀) dσ_J`.
    g_terms: Vec<(f64, usize, usize)>,
    /// `z_a g X_c b_J`: `−i_{e_a}(η₀) σ_c ∧ σ_J`.
    dbeta_terms: Vec<(f64, usize, usize, usize)>,
    q: Vec<CompiledPoly>,
    /// `X_c q_J`.
    dq: Vec<Vec<CompiledPoly>>,
    g: Option<(CompiledPoly, Vec<CompiledPoly>)>,
}

impl PairTensors {
    fn new(group: &CarnotGroup, pair: &TestPair) -> Self {
        let n = group.dim();
        let alg = group.algebra();
        let basis = FormBasis::LeftInvariant;
        let one = q_int(1);
        let sigma = |idx: &[usize]| ConstForm::monomial(n, idx, one.clone(), basis);
        let unit = |a: usize| {
            let mut v = vec![q_int(0); n];
            v[a] = one.clone();
            v
        };
        let top = |f: &ConstForm| q_to_f64(&f.top_coefficient());
        let masks: Vec<u64> = pair.beta.form.components().map(|(m, _)| m).collect();
        let sig_j: Vec<ConstForm> = masks.iter().map(|&m| sigma(&bits(m).collect::<Vec<_>>())).collect();
        let d_sig_j: Vec<ConstForm> = sig_j.iter().map(|s| d_left_invariant(alg, s)).collect();
        let d_eta = d_left_invariant(alg, &pair.eta);
        let mut dg_terms = Vec::new();
        let mut g_terms = Vec::new();
        let mut dbeta_terms = Vec::new();
        for a in 0..n {
            let e = unit(a);
            let i_eta = pair.eta.interior(&e).component(0);
            let i_deta = d_eta.interior(&e);
            for (jj, (sj, dsj)) in sig_j.iter().zip(&d_sig_j).enumerate() {
                let c = top(&i_deta.wedge(sj)) - q_to_f64(&i_eta) * top(dsj);
                if c != 0.0 {
                    g_terms.push((c, a, jj));
                }
                for b in 0..n {
                    if pair.factor.is_some() {
                        let v = top(&sigma(&[b]).wedge(&pair.eta).interior(&e).wedge(sj));
                        if v != 0.0 {
                            dg_terms.push((v, a, b, jj));
                        }
                    }
                    let w = -q_to_f64(&i_eta) * top(&sigma(&[b]).wedge(sj));
                    if w != 0.0 {
                        dbeta_terms.push((w, a, b, jj));
                    }
                }
            }
        }
        let frame = group.left_frame();
        let qs: Vec<Polynomial> = masks.iter().map(|&m| pair.beta.form.component(m)).collect();
        PairTensors {
            dg_terms,
            g_terms,
            dbeta_terms,
            q: qs.iter().map(|q| q.compile()).collect(),
            dq: qs.iter().map(|q| frame.iter().map(|x| x.apply(q).compile()).collect()).collect(),
            g: pair.factor.as_ref().map(|g| (g.compile(), frame.iter().map(|x| x.apply(g).compile()).collect())),
        }
    }

    /// `Σ_k w_k [i_Z dη ∧ β − i_Z η ∧ dβ]_top(x_k)`.
    fn integrate(&self, nodes: &BumpNodes, z: &[Vec<f64>]) -> f64 {
        let mut total = 0.0;
        for k in 0..nodes.len() {
            let x = &nodes.x[k];
            let phi = nodes.phi[k];
            let dphi = &nodes.dphi[k];
            let zk = &z[k];
            let q: Vec<f64> = self.q.iter().map(|p| p.eval(x)).collect();
            let b: Vec<f64> = q.iter().map(|v| phi * v).collect();
            let (g, dg) = match &self.g {
                Some((g, dg)) => (g.eval(x), dg.iter().map(|p| p.eval(x)).collect()),
                None => (1.0, Vec::new()),
            };
            let mut v = 0.0;
            for &(c, a, jj) in &self.g_terms {
                v += c * zk[a] * g * b[jj];
            }
            for &(c, a, bb, jj) in &self.dg_terms {
                v += c * zk[a] * dg[bb] * b[jj];
            }
            for &(c, a, cc, jj) in &self.dbeta_terms {
                let xb = q[jj] * dphi[cc] + phi * self.dq[jj][cc].eval(x);
                v += c * zk[a] * g * xb;
            }
            total += nodes.weight[k] * v;
        }
        total
    }
}

/// Signed value of `∫ i_Z(dη) ∧ β − ∫ i_Z(η) ∧ dβ` with a rule of the
/// given order per axis.
pub fn weak_residual(group: &CarnotGroup, z: &dyn NumericField, pair: &TestPair, order: usize) -> Result<f64> {
    check_field(group, z)?;
    let nodes = pair.beta.bump.nodes(group, order);
    let zv: Vec<Vec<f64>> = nodes.x.iter().map(|x| z.left_at(group, x)).collect();
    Ok(PairTensors::new(group, pair).integrate(&nodes, &zv))
}

/// The same identity computed pointwise with full form arithmetic at every
/// node. Slow; used to cross-check the tensor contraction.
pub fn weak_residual_pointwise(group: &CarnotGroup, z: &dyn NumericField, pair: &TestPair, order: usize) -> Result<f64> {
    check_field(group, z)?;
    let n = group.dim();
    let alg = group.algebra();
    let basis = FormBasis::LeftInvariant;
    let nodes = pair.beta.bump.nodes(group, order);
    let eta0 = pair.eta.to_f64();
    let d_eta0 = d_left_invariant(alg, &pair.eta).to_f64();
    let frame = group.left_frame();
    let masks: Vec<(u64, Polynomial)> = pair.beta.form.components().map(|(m, c)| (m, c.clone())).collect();
    let d_sigma: Vec<NumForm> = masks
        .iter()
        .map(|(m, _)| d_left_invariant(alg, &ConstForm::monomial(n, &bits(*m).collect::<Vec<_>>(), q_int(1), basis)).to_f64())
        .collect();
    let mut total = 0.0;
    for k in 0..nodes.len() {
        let x = &nodes.x[k];
        let zk = z.left_at(group, x);
        let (phi, dphi) = (nodes.phi[k], &nodes.dphi[k]);
        let (g, dg) = match &pair.factor {
            Some(g) => (g.eval_f64(x), NumForm::one_form(frame.iter().map(|f| f.apply(g).eval_f64(x)).collect(), basis)),
            None => (1.0, NumForm::zero(n, 1, basis)),
        };
        let eta = eta0.scale(&g);
        let d_eta = dg.wedge(&eta0).add(&d_eta0.scale(&g));
        let mut beta = NumForm::zero(n, n - 1, basis);
        let mut d_beta = NumForm::zero(n, n, basis);
        for ((m, q), ds) in masks.iter().zip(&d_sigma) {
            let qv = q.eval_f64(x);
            let mut s = NumForm::zero(n, n - 1, basis);
            s.set(*m, 1.0);
            beta = beta.add(&s.scale(&(phi * qv)));
            let grad: Vec<f64> = (0..n).map(|c| qv * dphi[c] + phi * frame[c].apply(q).eval_f64(x)).collect();
            d_beta = d_beta.add(&NumForm::one_form(grad, basis).wedge(&s)).add(&ds.scale(&(phi * qv)));
        }
        let integrand = d_eta.interior(&zk).wedge(&beta).sub(&eta.interior(&zk).wedge(&d_beta));
        total += nodes.weight[k] * integrand.component(full_mask(n));
    }
    Ok(total)
}

/// `±1` relating the two residuals for `(σ_(l,k), φ σ̂_(1,j))`, with `j`
/// 1-based: `weak = (−1)^j · coordinate`.
pub fn orientation_sign(j: usize) -> f64 {
    if j % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `∫ z_(l,k) X_(1,j)φ + Σ_r ∫ z_(l−1,r) α^{l−1,1,k}_{r,j} φ` with 1-based
/// `l ≥ 2`, `k` and `j`.
pub fn coordinate_weak_residual(
    group: &CarnotGroup,
    z: &dyn NumericField,
    l: usize,
    k: usize,
    j: usize,
    bump: &TestBump,
    order: usize,
) -> Result<f64> {
    check_field(group, z)?;
    let alg = group.algebra();
    let d1 = alg.strata()[0];
    if l < 2 || j == 0 || j > d1 {
        return Err(CarnotError::IndexOutOfRange(format!("(l,k,j) = ({l},{k},{j})")));
    }
    let t = alg.index(crate::algebra::BasisIndex::new(l, k))?;
    let alpha: Vec<(usize, f64)> = (1..=alg.strata()[l - 2])
        .filter_map(|r| {
            let c = q_to_f64(&alg.alpha(l - 1, r, j, k));
            (c != 0.0).then(|| (alg.index(crate::algebra::BasisIndex::new(l - 1, r)).unwrap(), c))
        })
        .collect();
    let nodes = bump.nodes(group, order);
    let mut total = 0.0;
    for i in 0..nodes.len() {
        let zi = z.left_at(group, &nodes.x[i]);
        let lower: f64 = alpha.iter().map(|(r, c)| zi[*r] * c).sum();
        total += nodes.weight[i] * (zi[t] * nodes.dphi[i][j - 1] + lower * nodes.phi[i]);
    }
    Ok(total)
}

fn check_field(group: &CarnotGroup, z: &dyn NumericField) -> Result<()> {
    if z.dim() != group.dim() {
        return Err(CarnotError::DimensionMismatch { expected: group.dim(), got: z.dim() });
    }
    Ok(())
}

/// Test pairs on a working box and the rule order used for them.
#[derive(Clone, Debug)]
pub struct TestFamily {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub pairs: Vec<TestPair>,
    pub order: usize,
}

impl TestFamily {
    /// Every `(σ_t, φ σ̂_j)` with `t` in layers `≥ 2` and `j` horizontal, for
    /// nine bumps: three interior centers times three dyadic radii.
    pub fn standard(group: &CarnotGroup, lo: &[f64], hi: &[f64], order: usize) -> Result<Self> {
        let mut pairs = Vec::new();
        let d1 = group.algebra().strata()[0];
        for bump in bump_stock(group, lo, hi)? {
            for t in d1..group.dim() {
                for j in 0..d1 {
                    pairs.push(TestPair::standard(group, t, j, bump.clone())?);
                }
            }
        }
        if pairs.is_empty() {
            return Err(CarnotError::EmptyFamily);
        }
        Ok(TestFamily { lo: lo.to_vec(), hi: hi.to_vec(), pairs, order })
    }

    /// Rule order that makes the family exact for polynomial fields whose
    /// left coefficients have weighted degree at most `degree`.
    pub fn exact_order(group: &CarnotGroup, degree: u32) -> usize {
        order_for_degree(group, degree)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Three centers (the midpoint and two translates by a quarter of the
/// half-widths, with alternating signs) and radii `R, R/2, R/4`, where `R`
/// is 0.9 times the largest radius whose support fits in the box.
pub fn bump_stock(group: &CarnotGroup, lo: &[f64], hi: &[f64]) -> Result<Vec<TestBump>> {
    let n = group.dim();
    if lo.len() != n || hi.len() != n {
        return Err(CarnotError::DimensionMismatch { expected: n, got: lo.len() });
    }
    if lo.iter().zip(hi).any(|(a, b)| a >= b) {
        return Err(CarnotError::EmptyDomain);
    }
    let mid: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| (a + b) / 2.0).collect();
    let shift: Vec<f64> =
        lo.iter().zip(hi).enumerate().map(|(i, (a, b))| (b - a) / 8.0 * if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
    let centers = [
        mid.clone(),
        mid.iter().zip(&shift).map(|(c, s)| c + s).collect::<Vec<f64>>(),
        mid.iter().zip(&shift).map(|(c, s)| c - s).collect::<Vec<f64>>(),
    ];
    let mut out = Vec::new();
    for c in centers {
        let fits = |r: f64| TestBump::new(c.clone(), r).map(|b| b.check_inside(group, lo, hi).is_ok()).unwrap_or(false);
        let (mut good, mut bad) = (0.0, (hi[0] - lo[0]).max(1.0) * 4.0);
        for _ in 0..60 {
            let mid = (good + bad) / 2.0;
            if fits(mid) {
                good = mid;
            } else {
                bad = mid;
            }
        }
        if good < 1e-6 {
            return Err(CarnotError::EmptyDomain);
        }
        for s in [1.0, 0.5, 0.25] {
            out.push(TestBump::new(c.clone(), 0.9 * good * s)?);
        }
    }
    Ok(out)
}

/// One residual per test pair.
#[derive(Clone, Debug)]
pub struct WeakContactReport {
    pub residuals: Vec<(String, f64)>,
    pub max_residual: f64,
    pub tol: f64,
    pub pass: bool,
}

impl fmt::Display for WeakContactReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (label, r) in &self.residuals {
            writeln!(f, "{r:>12.3e}  {label}")?;
        }
        write!(f, "max residual {:.3e} at tol {:.1e}: {}", self.max_residual, self.tol, if self.pass { "weak contact" } else { "not weak contact" })
    }
}

/// Evaluates every pair of the family; the field passes when the largest
/// absolute residual is at most `tol` (a NaN residual fails).
pub fn is_weak_contact(group: &CarnotGroup, z: &dyn NumericField, family: &TestFamily, tol: f64) -> Result<WeakContactReport> {
    check_field(group, z)?;
    if family.is_empty() {
        return Err(CarnotError::EmptyFamily);
    }
    let mut residuals = Vec::with_capacity(family.len());
    let mut cached: Option<(TestBump, BumpNodes, Vec<Vec<f64>>)> = None;
    for pair in &family.pairs {
        let bump = pair.bump();
        if cached.as_ref().is_none_or(|(b, _, _)| b != bump) {
            bump.check_inside(group, &family.lo, &family.hi)?;
            let nodes = bump.nodes(group, family.order);
            let zv = nodes.x.iter().map(|x| z.left_at(group, x)).collect();
            cached = Some((bump.clone(), nodes, zv));
        }
        let (_, nodes, zv) = cached.as_ref().unwrap();
        let r = PairTensors::new(group, pair).integrate(nodes, zv).abs();
        residuals.push((pair.label.clone(), r));
    }
    let max_residual = residuals.iter().map(|(_, r)| *r).fold(0.0, |m: f64, r| if m.is_nan() || r.is_nan() { f64::NAN } else { m.max(r) });
    Ok(WeakContactReport { pass: max_residual <= tol, residuals, max_residual, tol })
}

/// Reports of a field on the big box and of its smoothing on the shrunk box.
#[derive(Clone, Debug)]
pub struct StabilityReport {
    pub eps: f64,
    pub shrunk: (Vec<f64>, Vec<f64>),
    pub original: WeakContactReport,
    pub smoothed: WeakContactReport,
}

/// Smooths a polynomial field at scale `eps` and re-runs the standard family
/// on the shrunk box.
pub fn verify_mollification_stability(
    group: &CarnotGroup,
    z: &PolyVectorField,
    eps: f64,
    lo: &[f64],
    hi: &[f64],
    tol: f64,
) -> Result<StabilityReport> {
    let coeffs = group.left_coefficients(z)?;
    let degree = coeffs.iter().filter_map(|c| c.weighted_degree(group.weights())).max().unwrap_or(0);
    let order = TestFamily::exact_order(group, degree);
    let original = is_weak_contact(group, &LeftPolyField::from_coefficients(&coeffs), &TestFamily::standard(group, lo, hi, order)?, tol)?;
    let m = Mollifier::new(group, eps)?;
    let shrunk = m.shrunk_box(lo, hi)?;
    let smoothed_field = m.smooth_field_numeric(z)?;
    let family = TestFamily::standard(group, &shrunk.0, &shrunk.1, order)?;
    let smoothed = is_weak_contact(group, &smoothed_field, &family, tol)?;
    Ok(StabilityReport { eps, shrunk, original, smoothed })
}

/// `f_* Z` on a family placed in the image box. Errors when `Df` fails to
/// preserve the horizontal bundle beyond `contact_tol` or reverses
/// orientation at the family's bump centers.
pub fn verify_pushforward(
    group: &CarnotGroup,
    f: &dyn ContactMap,
    z: &dyn NumericField,
    family: &TestFamily,
    tol: f64,
    contact_tol: f64,
) -> Result<WeakContactReport> {
    let mut sources = Vec::new();
    for pair in &family.pairs {
        let x = f.inverse(&pair.bump().center)?;
        if !sources.contains(&x) {
            sources.push(x);
        }
    }
    let defect = horizontal_defect(group, f, &sources)?;
    if defect > contact_tol {
        return Err(CarnotError::NotContact(defect));
    }
    for x in &sources {
        let d = f.differential(x)?;
        let det = nalgebra::DMatrix::from_fn(d.len(), d.len(), |i, j| d[i][j]).determinant();
        if !(det > 0.0) {
            return Err(CarnotError::NotInvertible(format!("det Df = {det:e} at {x:?}")));
        }
    }
    is_weak_contact(group, &Pushforward { map: f, field: z }, family, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_polynomial;
    use crate::quadrature::bump_moment;

    fn p(s: &str) -> Polynomial {
        parse_polynomial(s).unwrap()
    }

    #[test]
    fn negative_example_matches_closed_form() {
        let g = CarnotGroup::builtin("heisenberg").unwrap();
        let z = LeftPolyField::from_field(&g, &g.left_frame()[0].mul_function(&p("x3"))).unwrap();
        let bump = TestBump::new(vec![0.0, 0.0, 0.5], 0.5).unwrap();
        let pair = TestPair::standard(&g, 2, 1, bump.clone()).unwrap();
        let r = weak_residual(&g, &z, &pair, 6).unwrap();
        let want = 0.5 * 0.5f64.powi(4) * bump_moment(0).powi(3);
        assert!((r.abs() - want).abs() < 1e-14, "{r} vs {want}");
        let slow = weak_residual_pointwise(&g, &z, &pair, 6).unwrap();
        assert!((r - slow).abs() < 1e-15);
        let coord = coordinate_weak_residual(&g, &z, 2, 1, 2, &bump, 6).unwrap();
        assert!((r - orientation_sign(2) * coord).abs() < 1e-15);
    }

    #[test]
    fn contact_fields_pass_and_factor_reduction() {
        let g = CarnotGroup::builtin("engel").unwrap();
        let lo = vec![-1.0; 4];
        let hi = vec![1.0; 4];
        let fam = TestFamily::standard(&g, &lo, &hi, 6).unwrap();
        assert_eq!(fam.len(), 9 * 2 * 2);
        for zr in g.right_frame() {
            let z = LeftPolyField::from_field(&g, zr).unwrap();
            let rep = is_weak_contact(&g, &z, &fam, 1e-10).unwrap();
            assert!(rep.pass, "{rep}");
        }
        // Residual against gη equals residual against η with β replaced by gβ.
        let z = LeftPolyField::from_coefficients(&[p("x2 + x3"), p("0"), p("x1"), p("x2^2 + x4")]);
        let bump = TestBump::new(vec![0.1, 0.0, -0.1, 0.05], 0.4).unwrap();
        let gpoly = p("1 + x1*x2");
        let with_factor = TestPair::standard(&g, 3, 0, bump.clone()).unwrap().with_factor(gpoly.clone());
        let beta = BumpForm::new(&g, bump, &g.sigma_hat(0).scale(&gpoly)).unwrap();
        let moved = TestPair::new(&g, &g.sigma(&[3]), None, beta, "").unwrap();
        let a = weak_residual(&g, &z, &with_factor, 8).unwrap();
        let b = weak_residual(&g, &z, &moved, 8).unwrap();
        assert!(a.abs() > 1e-6 && (a - b).abs() < 1e-16, "{a} {b}");
        let slow = weak_residual_pointwise(&g, &z, &with_factor, 8).unwrap();
        assert!((a - slow).abs() < 1e-16);
    }

    #[test]
    fn pair_validation() {
        let g = CarnotGroup::builtin("heisenberg").unwrap();
        let bump = TestBump::centered(3, 0.3).unwrap();
        assert!(matches!(TestPair::standard(&g, 0, 0, bump.clone()), Err(CarnotError::IndexOutOfRange(_))));
        let wrong_weight = BumpForm::new(&g, bump.clone(), &g.sigma(&[0, 1])).unwrap();
        assert!(matches!(TestPair::new(&g, &g.sigma(&[2]), None, wrong_weight, ""), Err(CarnotError::InvalidPair(_))));
        let beta = BumpForm::new(&g, bump, &g.sigma_hat(0)).unwrap();
        assert!(matches!(TestPair::new(&g, &g.sigma(&[0]), None, beta, ""), Err(CarnotError::InvalidPair(_))));
    }
}
