//! Group mollifiers and smoothing of functions, forms and vector fields.
//!
//! `ρ_ε * f(x) = ∫ ρ_ε(y) f(y⁻¹x) dy` with `ρ_ε(y) = ε^{−ν} ρ(δ_{1/ε} y)`.
//! Forms and fields are smoothed coefficientwise in the left-invariant
//! coframe and frame:
//! `θ^ε = Σ_I (ρ_ε * θ_I) σ_I` and `Z^ε = Σ_a (ρ_ε * z_a) X_a`.
//!
//! The default profile is a product of one-dimensional bumps,
//! `ρ(y) = Π_a b(y_a/κ_a) / (κ_a B₀)` with `κ_a = (2n)^{−l_a/(2 s!)}`, which
//! keeps the support inside the unit gauge ball. For this profile every
//! moment `∫ y^α ρ_ε` is a product of one-dimensional bump moments, so
//! polynomials are smoothed exactly up to rounding.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use crate::bump::{bound_polys, order_for_degree, TestBump};
use crate::error::{CarnotError, Result};
use crate::exterior::{bits, change_basis, full_mask, wedge_sign, DxToSigma, Form, FormBasis, NumForm, PolyForm, SampledForm};
use crate::group::{factorial, CarnotGroup, LeftPolyField, NumericField, PolyVectorField};
use crate::poly::{Monomial, Poly, Polynomial};
use crate::quadrature::{bump, bump_moment, bump_rule, gauss_legendre, tanh_sinh, Rule1d, TensorGrid};
use crate::rational::{q_to_f64, Ring};

/// A form with `f64` polynomial coefficients.
pub type FloatPolyForm = Form<Poly<f64>>;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Profile {
    /// Product of rescaled one-dimensional bumps.
    Tensor,
    /// `exp(−1/(1 − N(y)))` on the gauge ball `N < 1`, normalized numerically.
    Gauge,
}

pub struct Mollifier<'g> {
    group: &'g CarnotGroup,
    profile: Profile,
    eps: f64,
    /// Per-coordinate half-width of the support box of `ρ` (unscaled).
    kappa: Vec<f64>,
    /// Normalization constant of the profile.
    norm: f64,
    order: usize,
    kernel: OnceLock<Vec<(Vec<f64>, f64)>>,
    moments: Mutex<HashMap<Vec<u32>, f64>>,
}

impl<'g> Mollifier<'g> {
    pub fn new(group: &'g CarnotGroup, eps: f64) -> Result<Self> {
        Self::with_profile(group, eps, Profile::Tensor)
    }

    pub fn with_profile(group: &'g CarnotGroup, eps: f64, profile: Profile) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(CarnotError::NonPositiveScale(eps));
        }
        let n = group.dim() as f64;
        let sf = factorial(group.step()) as f64;
        let (kappa, norm) = match profile {
            Profile::Tensor => {
                let kappa: Vec<f64> =
                    group.weights().iter().map(|&l| (2.0 * n).powf(-(l as f64) / (2.0 * sf))).collect();
                let norm = 1.0 / kappa.iter().map(|k| k * bump_moment(0)).product::<f64>();
                (kappa, norm)
            }
            Profile::Gauge => {
                let kappa = vec![1.0; group.dim()];
                let raw = tensor_tanh_sinh(&kappa, gauge_step(group.dim()), |y| gauge_profile(group, y));
                (kappa, 1.0 / raw)
            }
        };
        Ok(Mollifier {
            group,
            profile,
            eps,
            kappa,
            norm,
            order: 10,
            kernel: OnceLock::new(),
            moments: Mutex::new(HashMap::new()),
        })
    }

    /// Order of the per-axis rule used for non-polynomial integrands.
    pub fn with_order(mut self, order: usize) -> Self {
        self.order = order;
        self.kernel = OnceLock::new();
        self
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn profile(&self) -> Profile {
        self.profile
    }

    pub fn group(&self) -> &CarnotGroup {
        self.group
    }

    /// The unscaled profile `ρ`.
    pub fn rho(&self, y: &[f64]) -> f64 {
        match self.profile {
            Profile::Tensor => self.norm * y.iter().zip(&self.kappa).map(|(v, k)| bump(v / k)).product::<f64>(),
            Profile::Gauge => self.norm * gauge_profile(self.group, y),
        }
    }

    /// `ρ_ε(y) = ε^{−ν} ρ(δ_{1/ε} y)`.
    pub fn rho_eps(&self, y: &[f64]) -> f64 {
        let nu = self.group.homogeneous_dimension() as i32;
        self.eps.powi(-nu) * self.rho(&self.group.dilate_point(1.0 / self.eps, y))
    }

    /// Half-widths of a coordinate box containing `supp ρ_ε`.
    pub fn support_half_widths(&self) -> Vec<f64> {
        self.kappa.iter().zip(self.group.weights()).map(|(k, &l)| k * self.eps.powi(l as i32)).collect()
    }

    /// `∫ ρ_ε` by a tensor double-exponential rule with step `h` over the
    /// support box, treating `ρ_ε` as a black box.
    pub fn total_mass(&self, h: f64) -> f64 {
        tensor_tanh_sinh(&self.support_half_widths(), h, |y| self.rho_eps(y))
    }

    /// `∫ y^α ρ_ε(y) dy`.
    pub fn moment(&self, exps: &[u32]) -> f64 {
        if exps.iter().any(|e| e % 2 == 1) {
            return 0.0;
        }
        let s = self.support_half_widths();
        match self.profile {
            Profile::Tensor => exps
                .iter()
                .zip(&s)
                .map(|(&e, sa)| sa.powi(e as i32) * bump_moment(e as usize) / bump_moment(0))
                .product(),
            Profile::Gauge => {
                if let Some(v) = self.moments.lock().unwrap().get(exps) {
                    return *v;
                }
                let v = tensor_tanh_sinh(&s, gauge_step(exps.len()), |y| {
                    self.rho_eps(y) * y.iter().zip(exps).map(|(v, &e)| v.powi(e as i32)).product::<f64>()
                });
                self.moments.lock().unwrap().insert(exps.to_vec(), v);
                v
            }
        }
    }

    /// Nodes and weights with `Σ ω_k g(y_k) ≈ ∫ ρ_ε g`.
    fn kernel(&self) -> &[(Vec<f64>, f64)] {
        self.kernel.get_or_init(|| {
            let s = self.support_half_widths();
            match self.profile {
                Profile::Tensor => {
                    let rule = bump_rule(self.order);
                    let b0 = bump_moment(0);
                    let axis = Rule1d {
                        nodes: rule.nodes.clone(),
                        weights: rule.nodes.iter().zip(&rule.weights).map(|(u, w)| w * bump(*u) / b0).collect(),
                    };
                    let grid = TensorGrid { axes: s.iter().map(|sa| scale_rule(&axis, *sa)).collect() };
                    let mut out = Vec::with_capacity(grid.len());
                    grid.for_each(|y, w| out.push((y.to_vec(), w)));
                    out
                }
                Profile::Gauge => {
                    let h = gauge_step(s.len());
                    let r = tanh_sinh(h, S_MAX);
                    let grid = TensorGrid { axes: s.iter().map(|sa| r.mapped(-sa, *sa)).collect() };
                    let mut out = Vec::new();
                    grid.for_each(|y, w| {
                        let v = self.rho_eps(y);
                        if v > 0.0 {
                            out.push((y.to_vec(), w * v));
                        }
                    });
                    out
                }
            }
        })
    }

    /// `ρ_ε * f (x) = ∫ ρ_ε(y) f(y⁻¹x) dy` by quadrature.
    pub fn convolve(&self, f: impl Fn(&[f64]) -> f64, x: &[f64]) -> f64 {
        let g = self.group;
        self.kernel().iter().map(|(y, w)| w * f(&g.product_f64(&g.inverse_f64(y), x))).sum()
    }

    /// The three integral expressions of the convolution:
    /// `∫ ρ_ε(xy⁻¹) f(y) dy`, `∫ ρ_ε(y⁻¹) f(yx) dy`, `∫ ρ_ε(y) f(y⁻¹x) dy`.
    /// The first is computed on a composite Gauss grid over a box containing
    /// its support (`cells` cells of order 8 per axis).
    pub fn convolve_three(&self, f: impl Fn(&[f64]) -> f64, x: &[f64], cells: usize) -> [f64; 3] {
        let g = self.group;
        // ∫ ρ_ε(x y⁻¹) f(y) dy over the box containing { z⁻¹ x : z ∈ supp ρ_ε }.
        let polys = self.inverse_product_at(x);
        let (lo, hi) = bound_polys(&polys, &self.support_half_widths());
        let grid = TensorGrid { axes: lo.iter().zip(&hi).map(|(a, b)| composite_gauss(*a, *b, cells, 8)).collect() };
        let first = grid.integrate(|y| {
            let r = self.rho_eps(&g.product_f64(x, &g.inverse_f64(y)));
            if r == 0.0 {
                0.0
            } else {
                r * f(y)
            }
        });
        let second: f64 = self
            .kernel()
            .iter()
            .map(|(y, w)| {
                let plain = w / self.rho_eps(y);
                plain * self.rho_eps(&g.inverse_f64(y)) * f(&g.product_f64(y, x))
            })
            .sum();
        let third = self.convolve(&f, x);
        [first, second, third]
    }

    /// Coordinates of `y ↦ y⁻¹x` as polynomials in `y`.
    fn inverse_product_at(&self, x: &[f64]) -> Vec<Poly<f64>> {
        let n = self.group.dim();
        let subs: Vec<Poly<f64>> = (0..2 * n)
            .map(|v| if v < n { Poly::var(v).scale(&-1.0) } else { Poly::constant(x[v - n]) })
            .collect();
        self.group.law().iter().map(|p| p.to_f64().compose(&subs)).collect()
    }

    /// `ρ_ε * f` for a polynomial `f`, exactly up to the moments.
    pub fn smooth_poly(&self, f: &Polynomial) -> Poly<f64> {
        let n = self.group.dim();
        // f(y⁻¹x) with x in variables 0..n and y in n..2n.
        let subs: Vec<Polynomial> = (0..2 * n)
            .map(|v| if v < n { Polynomial::var(n + v).neg() } else { Polynomial::var(v - n) })
            .collect();
        let inv: Vec<Polynomial> = self.group.law().iter().map(|p| p.compose(&subs)).collect();
        let full = f.compose(&inv);
        let mut out = Poly::<f64>::zero();
        for (m, c) in full.terms() {
            let (xm, ym) = split_monomial(m, n);
            let mom = self.moment(&ym.exponents(n));
            if mom != 0.0 {
                out.add_term(xm, &(q_to_f64(c) * mom));
            }
        }
        out
    }

    /// `θ^ε` in the left-invariant coframe.
    pub fn smooth_form(&self, theta: &PolyForm) -> Result<FloatPolyForm> {
        let s = to_sigma(self.group, theta)?;
        Ok(s.map_ring(|c| self.smooth_poly(c)))
    }

    /// Left-frame coefficients of `Z^ε`.
    pub fn smooth_field(&self, z: &PolyVectorField) -> Result<Vec<Poly<f64>>> {
        Ok(self.group.left_coefficients(z)?.iter().map(|c| self.smooth_poly(c)).collect())
    }

    /// `Z^ε` as a numerically evaluable field.
    pub fn smooth_field_numeric(&self, z: &PolyVectorField) -> Result<LeftPolyField> {
        Ok(LeftPolyField::from_coefficients(&self.smooth_field(z)?))
    }

    /// `Z^ε` for a field known only through evaluations, by quadrature in `y`.
    pub fn smooth_numeric<'a>(&'a self, z: &'a dyn NumericField) -> SmoothedField<'a> {
        SmoothedField { mollifier: self, inner: z }
    }

    /// `θ^ε` at `x` for a continuous form, in the left-invariant coframe.
    pub fn smooth_continuous_at(&self, theta: &ContinuousForm, x: &[f64]) -> NumForm {
        let mut out = NumForm::zero(theta.n, theta.degree, FormBasis::LeftInvariant);
        for (mask, f) in &theta.comps {
            out.set(*mask, self.convolve(|y| f(y), x));
        }
        out
    }

    /// `θ^ε` sampled on the nodes of `grid`.
    pub fn smooth_continuous(&self, theta: &ContinuousForm, grid: &TensorGrid) -> SampledForm {
        SampledForm::sample(grid, theta.degree, FormBasis::LeftInvariant, |x| self.smooth_continuous_at(theta, x))
    }

    /// The box `lo..hi` shrunk so that `y⁻¹x` stays in `lo..hi` for every
    /// `x` in the result and `y` in the support of `ρ_ε`.
    pub fn shrunk_box(&self, lo: &[f64], hi: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let n = self.group.dim();
        let center: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| (a + b) / 2.0).collect();
        let half: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| (b - a) / 2.0).collect();
        // y⁻¹(c + v) with v in variables 0..n and y in n..2n.
        let subs: Vec<Poly<f64>> = (0..2 * n)
            .map(|v| {
                if v < n {
                    Poly::var(n + v).scale(&-1.0)
                } else {
                    let mut p = Poly::var(v - n);
                    p.add_term(Monomial::one(), &center[v - n]);
                    p
                }
            })
            .collect();
        let polys: Vec<Poly<f64>> = self.group.law().iter().map(|p| p.to_f64().compose(&subs)).collect();
        let s = self.support_half_widths();
        let fits = |t: f64| {
            let widths: Vec<f64> = half.iter().map(|h| h * t).chain(s.iter().copied()).collect();
            let (a, b) = bound_polys(&polys, &widths);
            (0..n).all(|i| a[i] >= lo[i] && b[i] <= hi[i])
        };
        if !fits(0.0) {
            return Err(CarnotError::EmptyDomain);
        }
        let (mut good, mut bad) = (0.0, 1.0);
        if fits(1.0) {
            good = 1.0;
        } else {
            for _ in 0..40 {
                let mid = (good + bad) / 2.0;
                if fits(mid) {
                    good = mid;
                } else {
                    bad = mid;
                }
            }
        }
        if good <= 0.0 {
            return Err(CarnotError::EmptyDomain);
        }
        Ok((
            center.iter().zip(&half).map(|(c, h)| c - h * good).collect(),
            center.iter().zip(&half).map(|(c, h)| c + h * good).collect(),
        ))
    }

    /// `∫ θ^ε ∧ β` and `∫ θ ∧ β^ε` for a polynomial `k`-form `θ` and a bump
    /// form `β` of degree `n − k`.
    pub fn verify_duality(&self, theta: &PolyForm, beta: &BumpForm) -> Result<Residual> {
        let theta = to_sigma(self.group, theta)?;
        beta.check(self.group, theta.degree())?;
        let smoothed = theta.map_ring(|c| self.smooth_poly(c));
        let lhs = beta.integrate_wedge(self.group, &smoothed);
        let rhs = self.pair_with_smoothed_bump(&theta, beta);
        Ok(Residual::new(lhs, rhs))
    }

    /// `∫ i_{X^ε} α ∧ β` and `∫ i_X α ∧ β^ε` for a left-invariant `α`.
    pub fn verify_interior_duality(&self, alpha: &PolyForm, x: &PolyVectorField, beta: &BumpForm) -> Result<Residual> {
        let alpha = to_sigma(self.group, alpha)?;
        if alpha.components().any(|(_, c)| !c.is_constant()) {
            return Err(CarnotError::NotLeftInvariant);
        }
        if alpha.degree() == 0 {
            return Err(CarnotError::DimensionMismatch { expected: 1, got: 0 });
        }
        beta.check(self.group, alpha.degree() - 1)?;
        let z = self.group.left_coefficients(x)?;
        let zf: Vec<Poly<f64>> = z.iter().map(|c| self.smooth_poly(c)).collect();
        let alpha_f = alpha.map_ring(|c| c.to_f64());
        let lhs = beta.integrate_wedge(self.group, &alpha_f.interior(&zf));
        let rhs = self.pair_with_smoothed_bump(&alpha.interior(&z), beta);
        Ok(Residual::new(lhs, rhs))
    }

    /// `∫ θ ∧ β^ε = Σ ± ∫ ρ_ε(y) [∫ θ_I(y·w) q_J(w) φ(w) dw] dy`, with the
    /// inner integral expanded in monomials of `w`.
    fn pair_with_smoothed_bump(&self, theta: &PolyForm, beta: &BumpForm) -> f64 {
        let g = self.group;
        let n = g.dim();
        let weights = g.weights();
        let mut total = 0.0;
        for (mi, ti) in theta.components() {
            let mj = full_mask(n) & !mi;
            let qj = beta.form.component(mj);
            if qj.is_zero() {
                continue;
            }
            let sign = wedge_sign(mi, mj) as f64;
            // θ_I(y·w): y in variables 0..n, w in n..2n.
            let composed = ti.compose(g.law());
            let mut by_w: BTreeMap<Monomial, Polynomial> = BTreeMap::new();
            for (m, c) in composed.terms() {
                let (ym, wm) = split_monomial(m, n);
                by_w.entry(wm).or_insert_with(Polynomial::zero).add_term(ym, c);
            }
            let max_deg = by_w.keys().map(|m| m.weighted_degree(weights)).max().unwrap_or(0)
                + qj.weighted_degree(weights).unwrap_or(0);
            let nodes = beta.bump.nodes(g, order_for_degree(g, max_deg));
            let q = qj.compile();
            for (wm, gy) in &by_w {
                let wexp = wm.exponents(n);
                let inner = nodes.integrate(|w| {
                    q.eval(w) * w.iter().zip(&wexp).map(|(v, &e)| v.powi(e as i32)).product::<f64>()
                });
                if inner == 0.0 {
                    continue;
                }
                let outer: f64 = gy.terms().map(|(m, c)| q_to_f64(c) * self.moment(&m.exponents(n))).sum();
                total += sign * inner * outer;
            }
        }
        total
    }

    /// Sup over `points` of `|dθ^ε − (dθ)^ε|` in the coordinate coframe,
    /// with `dθ^ε` from central differences of step `h`.
    pub fn verify_d_commutes(&self, theta: &PolyForm, points: &[Vec<f64>], h: f64) -> Result<f64> {
        let g = self.group;
        let n = g.dim();
        let theta_dx = match theta.basis() {
            FormBasis::Coordinate => theta.clone(),
            FormBasis::LeftInvariant => g.to_coordinate(theta)?,
        };
        let smoothed = self.smooth_form(&theta_dx)?;
        let d_smoothed_exact = self.smooth_form(&theta_dx.d()?)?;
        let compiled = |f: &FloatPolyForm| -> Vec<(u64, crate::poly::CompiledPoly)> {
            f.components().map(|(m, c)| (m, c.compile())).collect()
        };
        let th = compiled(&smoothed);
        let dth = compiled(&d_smoothed_exact);
        let at = |comps: &[(u64, crate::poly::CompiledPoly)], degree: usize, x: &[f64]| -> NumForm {
            let mut f = NumForm::zero(n, degree, FormBasis::LeftInvariant);
            for (m, c) in comps {
                f.set(*m, c.eval(x));
            }
            change_basis(&f, &g.left_coframe_matrix_f64(x), FormBasis::Coordinate)
        };
        let k = theta.degree();
        let mut worst: f64 = 0.0;
        for x in points {
            let mut fd = NumForm::zero(n, (k + 1).min(n), FormBasis::Coordinate);
            for j in 0..n {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[j] += h;
                xm[j] -= h;
                let diff = at(&th, k, &xp).sub(&at(&th, k, &xm)).scale(&(0.5 / h));
                let dxj = NumForm::monomial(n, &[j], 1.0, FormBasis::Coordinate);
                fd = fd.add(&dxj.wedge(&diff));
            }
            let exact = at(&dth, (k + 1).min(n), x);
            worst = worst.max(fd.sub(&exact).max_abs());
        }
        Ok(worst)
    }

    /// Sup over `points` and components of `|θ^ε − θ|`.
    pub fn sup_error(&self, theta: &ContinuousForm, points: &[Vec<f64>]) -> f64 {
        points
            .iter()
            .map(|x| {
                let s = self.smooth_continuous_at(theta, x);
                theta.comps.iter().map(|(m, f)| (s.component(*m) - f(x)).abs()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    /// Grid `L¹` norm of `θ^ε − θ` (sum over components).
    pub fn l1_error(&self, theta: &ContinuousForm, grid: &TensorGrid) -> f64 {
        grid.integrate(|x| {
            let s = self.smooth_continuous_at(theta, x);
            theta.comps.iter().map(|(m, f)| (s.component(*m) - f(x)).abs()).sum()
        })
    }
}

/// Two sides of an integral identity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Residual {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

impl Residual {
    fn new(lhs: f64, rhs: f64) -> Self {
        Residual { lhs, rhs, residual: (lhs - rhs).abs() }
    }
}

/// `β = φ · Σ_J q_J σ_J` with polynomial `q_J` and a test bump `φ`.
#[derive(Clone, Debug)]
pub struct BumpForm {
    pub bump: TestBump,
    /// The polynomial factor, in the left-invariant coframe.
    pub form: PolyForm,
}

impl BumpForm {
    pub fn new(group: &CarnotGroup, bump: TestBump, form: &PolyForm) -> Result<Self> {
        Ok(BumpForm { bump, form: to_sigma(group, form)? })
    }

    fn check(&self, group: &CarnotGroup, complement: usize) -> Result<()> {
        let n = group.dim();
        if self.form.degree() + complement != n {
            return Err(CarnotError::DimensionMismatch { expected: n - complement, got: self.form.degree() });
        }
        if self.bump.center.len() != n {
            return Err(CarnotError::DimensionMismatch { expected: n, got: self.bump.center.len() });
        }
        Ok(())
    }

    /// `∫ θ ∧ β` for `θ` with `f64` polynomial σ-coefficients.
    pub fn integrate_wedge(&self, group: &CarnotGroup, theta: &FloatPolyForm) -> f64 {
        let n = group.dim();
        let weights = group.weights();
        let mut terms = Vec::new();
        let mut max_deg = 0;
        for (mi, ti) in theta.components() {
            let mj = full_mask(n) & !mi;
            let qj = self.form.component(mj);
            if qj.is_zero() || bits(mi).count() + bits(mj).count() != n {
                continue;
            }
            let d = ti.weighted_degree(weights).unwrap_or(0) + qj.weighted_degree(weights).unwrap_or(0);
            max_deg = max_deg.max(d);
            terms.push((wedge_sign(mi, mj) as f64, ti.compile(), qj.compile()));
        }
        if terms.is_empty() {
            return 0.0;
        }
        let nodes = self.bump.nodes(group, order_for_degree(group, max_deg));
        nodes.integrate(|x| terms.iter().map(|(s, t, q)| s * t.eval(x) * q.eval(x)).sum())
    }
}

/// A form in the left-invariant coframe with continuous coefficients.
#[derive(Clone)]
pub struct ContinuousForm {
    pub n: usize,
    pub degree: usize,
    pub comps: Vec<(u64, Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>)>,
}

impl ContinuousForm {
    pub fn new(n: usize, degree: usize) -> Self {
        ContinuousForm { n, degree, comps: Vec::new() }
    }

    /// Adds `f σ_I` for sorted indices `I`.
    pub fn with(mut self, indices: &[usize], f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        let mask = indices.iter().fold(0u64, |m, i| m | (1 << i));
        self.comps.push((mask, Arc::new(f)));
        self
    }

    pub fn eval(&self, x: &[f64]) -> NumForm {
        let mut out = NumForm::zero(self.n, self.degree, FormBasis::LeftInvariant);
        for (m, f) in &self.comps {
            out.add_to(*m, &f(x));
        }
        out
    }
}

/// `Z^ε` for a field given by evaluations.
pub struct SmoothedField<'a> {
    mollifier: &'a Mollifier<'a>,
    inner: &'a dyn NumericField,
}

impl NumericField for SmoothedField<'_> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn left_at(&self, group: &CarnotGroup, x: &[f64]) -> Vec<f64> {
        let mut acc = vec![0.0; self.dim()];
        for (y, w) in self.mollifier.kernel() {
            let p = group.product_f64(&group.inverse_f64(y), x);
            for (a, v) in self.inner.left_at(group, &p).iter().enumerate() {
                acc[a] += w * v;
            }
        }
        acc
    }
}

fn to_sigma(group: &CarnotGroup, theta: &PolyForm) -> Result<PolyForm> {
    if theta.dim() != group.dim() {
        return Err(CarnotError::DimensionMismatch { expected: group.dim(), got: theta.dim() });
    }
    match theta.basis() {
        FormBasis::LeftInvariant => Ok(theta.clone()),
        FormBasis::Coordinate => group.to_left_invariant(theta),
    }
}

/// Splits a monomial into its parts in variables `< n` and `≥ n` (the
/// latter renumbered from 0).
fn split_monomial(m: &Monomial, n: usize) -> (Monomial, Monomial) {
    let mut a = Monomial::one();
    let mut b = Monomial::one();
    for &(v, e) in &m.0 {
        if (v as usize) < n {
            a.0.push((v, e));
        } else {
            b.0.push((v - n as u16, e));
        }
    }
    (a, b)
}

fn gauge_profile(group: &CarnotGroup, y: &[f64]) -> f64 {
    let big = group.gauge(y).powi(2 * factorial(group.step()) as i32);
    if big >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - big)).exp()
    }
}

/// Truncation of the double-exponential rule. The profiles are flat to all
/// orders at the edge of their support, so nodes with `|s| > 1.5` carry
/// values below `1e−30`.
const S_MAX: f64 = 1.5;

fn gauge_step(n: usize) -> f64 {
    if n <= 4 {
        1.0 / 8.0
    } else {
        1.0 / 4.0
    }
}

fn scale_rule(r: &Rule1d, s: f64) -> Rule1d {
    Rule1d { nodes: r.nodes.iter().map(|u| u * s).collect(), weights: r.weights.clone() }
}

/// `m`-point Gauss–Legendre on each of `cells` equal subintervals.
pub fn composite_gauss(lo: f64, hi: f64, cells: usize, m: usize) -> Rule1d {
    let base = gauss_legendre(m);
    let mut out = Rule1d { nodes: Vec::new(), weights: Vec::new() };
    let h = (hi - lo) / cells as f64;
    for c in 0..cells {
        let r = base.mapped(lo + c as f64 * h, lo + (c + 1) as f64 * h);
        out.nodes.extend(r.nodes);
        out.weights.extend(r.weights);
    }
    out
}

/// Tensor tanh-sinh quadrature over the box `|y_a| ≤ half[a]`.
fn tensor_tanh_sinh(half: &[f64], h: f64, f: impl Fn(&[f64]) -> f64) -> f64 {
    let r = tanh_sinh(h, S_MAX);
    let grid = TensorGrid { axes: half.iter().map(|s| r.mapped(-s, *s)).collect() };
    grid.integrate(f)
}
