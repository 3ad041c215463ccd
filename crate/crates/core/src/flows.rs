//! Flows of vector fields, contact maps, and flow-composition charts.
//!
//! Integration uses the Dormand–Prince 5(4) pair with step-size control and
//! its fourth-order continuous extension. Differentials of flow maps come
//! from the variational equation `J' = DZ(x) J`, integrated alongside the
//! trajectory.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{CarnotError, Result};
use crate::group::{CarnotGroup, CompiledMap, NumericField, PolyMap, PolyVectorField};
use crate::poly::CompiledPoly;
use crate::rational::Q;

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights minus the embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// Tolerances and limits for the integrator.
#[derive(Clone, Debug)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Integration fails if the state leaves this box.
    pub bounds: Option<(Vec<f64>, Vec<f64>)>,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { rtol: 1e-10, atol: 1e-12, max_steps: 100_000, bounds: None }
    }
}

/// One accepted step with the data of its continuous extension.
#[derive(Clone, Debug)]
struct Segment {
    t0: f64,
    h: f64,
    coeffs: [Vec<f64>; 5],
}

/// Result of an integration: end state and dense output.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub t_end: f64,
    pub end: Vec<f64>,
    pub steps: usize,
    segments: Vec<Segment>,
}

impl Trajectory {
    /// State at an intermediate time, from the continuous extension.
    pub fn at(&self, t: f64) -> Vec<f64> {
        if self.segments.is_empty() {
            return self.end.clone();
        }
        let seg = self
            .segments
            .iter()
            .find(|s| {
                let (a, b) = (s.t0, s.t0 + s.h);
                (a.min(b)..=a.max(b)).contains(&t)
            })
            .unwrap_or_else(|| self.segments.last().unwrap());
        let th = (t - seg.t0) / seg.h;
        let th1 = 1.0 - th;
        let [r1, r2, r3, r4, r5] = &seg.coeffs;
        (0..r1.len()).map(|i| r1[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i])))).collect()
    }
}

/// Integrates the autonomous system `y' = f(y)` from `y0` over `[0, t]`
/// (`t` may be negative).
pub fn integrate(f: impl Fn(&[f64]) -> Vec<f64>, y0: &[f64], t: f64, opts: &OdeOptions) -> Result<Trajectory> {
    let n = y0.len();
    let mut y = y0.to_vec();
    if t == 0.0 {
        return Ok(Trajectory { t_end: 0.0, end: y, steps: 0, segments: Vec::new() });
    }
    let dir = t.signum();
    let mut tc = 0.0;
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
    k[0] = f(&y);
    let mut h = dir * t.abs().min(1e-2);
    let mut segments = Vec::new();
    let mut steps = 0;
    let mut stage = vec![0.0; n];
    while (t - tc) * dir > 0.0 {
        if steps >= opts.max_steps {
            return Err(CarnotError::StepUnderflow(tc));
        }
        if h.abs() < 1e-14 * t.abs().max(1.0) && (tc + h - t) * dir < 0.0 {
            return Err(CarnotError::StepUnderflow(tc));
        }
        if (tc + h - t) * dir > 0.0 {
            h = t - tc;
        }
        for s in 1..7 {
            for i in 0..n {
                stage[i] = y[i] + h * (0..s).map(|r| A[s][r] * k[r][i]).sum::<f64>();
            }
            k[s] = f(&stage);
        }
        // Stage 7 is evaluated at the fifth-order solution.
        let y_new = stage.clone();
        let mut err: f64 = 0.0;
        for i in 0..n {
            let e = h * (0..7).map(|s| E[s] * k[s][i]).sum::<f64>();
            let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            err = err.max((e / sc).abs());
        }
        if err <= 1.0 {
            let diff: Vec<f64> = (0..n).map(|i| y_new[i] - y[i]).collect();
            let bspl: Vec<f64> = (0..n).map(|i| h * k[0][i] - diff[i]).collect();
            let r4: Vec<f64> = (0..n).map(|i| diff[i] - h * k[6][i] - bspl[i]).collect();
            let r5: Vec<f64> = (0..n).map(|i| h * (0..7).map(|s| D[s] * k[s][i]).sum::<f64>()).collect();
            segments.push(Segment { t0: tc, h, coeffs: [y.clone(), diff, bspl, r4, r5] });
            tc += h;
            y = y_new;
            k[0] = k[6].clone();
            steps += 1;
            if let Some((lo, hi)) = &opts.bounds {
                if y.iter().zip(lo.iter().zip(hi)).any(|(v, (a, b))| v < a || v > b || !v.is_finite()) {
                    return Err(CarnotError::LeftBox(tc));
                }
            } else if y.iter().any(|v| !v.is_finite()) {
                return Err(CarnotError::LeftBox(tc));
            }
        }
        let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= fac;
    }
    Ok(Trajectory { t_end: t, end: y, steps, segments })
}

/// `φ^Z_t(x)` for a field given numerically.
pub fn flow(group: &CarnotGroup, z: &dyn NumericField, x: &[f64], t: f64, opts: &OdeOptions) -> Result<Vec<f64>> {
    Ok(integrate(|y| z.coordinates_at(group, y), x, t, opts)?.end)
}

/// A map between open sets of the group with a computable inverse and
/// differential.
pub trait ContactMap: Send + Sync {
    fn dim(&self) -> usize;
    fn label(&self) -> String;
    fn apply(&self, x: &[f64]) -> Result<Vec<f64>>;
    fn inverse(&self, y: &[f64]) -> Result<Vec<f64>>;
    /// `J[i][j] = ∂f_i/∂x_j`.
    fn differential(&self, x: &[f64]) -> Result<Vec<Vec<f64>>>;
}

/// A polynomial map with polynomial inverse.
#[derive(Clone, Debug)]
pub struct PolyContactMap {
    label: String,
    map: PolyMap,
    forward: CompiledMap,
    backward: CompiledMap,
}

impl PolyContactMap {
    pub fn new(label: impl Into<String>, map: PolyMap) -> Result<Self> {
        let inv = map.inverse()?;
        Ok(PolyContactMap { label: label.into(), forward: map.compile(), backward: inv.compile(), map })
    }

    pub fn identity(n: usize) -> Self {
        Self::new("id", PolyMap::identity(n)).expect("identity has an inverse")
    }

    pub fn left_translation(group: &CarnotGroup, a: &[Q]) -> Result<Self> {
        let label = format!("l_[{}]", a.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","));
        Self::new(label, group.left_translation(a)?)
    }

    pub fn dilation(group: &CarnotGroup, t: &Q) -> Result<Self> {
        Self::new(format!("delta_{t}"), group.dilation(t)?)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &PolyContactMap) -> Result<Self> {
        Self::new(format!("{}*{}", self.label, inner.label), self.map.compose(&inner.map))
    }

    pub fn poly_map(&self) -> &PolyMap {
        &self.map
    }
}

impl ContactMap for PolyContactMap {
    fn dim(&self) -> usize {
        self.map.dim()
    }

    fn label(&self) -> String {
        self.label.clone()
    }

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.forward.apply(x))
    }

    fn inverse(&self, y: &[f64]) -> Result<Vec<f64>> {
        Ok(self.backward.apply(y))
    }

    fn differential(&self, x: &[f64]) -> Result<Vec<Vec<f64>>> {
        Ok(self.forward.differential(x))
    }
}

/// The time-`t` flow of a polynomial field.
#[derive(Clone, Debug)]
pub struct FlowMap {
    field: Vec<CompiledPoly>,
    jacobian: Vec<Vec<CompiledPoly>>,
    time: f64,
    label: String,
    pub options: OdeOptions,
}

impl FlowMap {
    pub fn new(z: &PolyVectorField, time: f64) -> Self {
        let n = z.dim();
        FlowMap {
            field: z.components.iter().map(|p| p.compile()).collect(),
            jacobian: z.components.iter().map(|p| (0..n).map(|b| p.deriv(b).compile()).collect()).collect(),
            time,
            label: format!("flow_{time}"),
            options: OdeOptions::default(),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    fn run(&self, x: &[f64], t: f64) -> Result<Vec<f64>> {
        Ok(integrate(|y| self.field.iter().map(|p| p.eval(y)).collect(), x, t, &self.options)?.end)
    }

    /// End point and differential of the time-`t` flow.
    pub fn run_with_differential(&self, x: &[f64], t: f64) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        let n = self.field.len();
        let mut y0 = x.to_vec();
        for i in 0..n {
            for j in 0..n {
                y0.push(if i == j { 1.0 } else { 0.0 });
            }
        }
        let rhs = |y: &[f64]| {
            let (p, jm) = y.split_at(n);
            let mut out: Vec<f64> = self.field.iter().map(|f| f.eval(p)).collect();
            let dz: Vec<Vec<f64>> = self.jacobian.iter().map(|r| r.iter().map(|f| f.eval(p)).collect()).collect();
            for i in 0..n {
                for j in 0..n {
                    out.push((0..n).map(|k| dz[i][k] * jm[k * n + j]).sum());
                }
            }
            out
        };
        let mut opts = self.options.clone();
        if let Some((lo, hi)) = &opts.bounds {
            let mut lo = lo.clone();
            let mut hi = hi.clone();
            lo.extend(std::iter::repeat(f64::NEG_INFINITY).take(n * n));
            hi.extend(std::iter::repeat(f64::INFINITY).take(n * n));
            opts.bounds = Some((lo, hi));
        }
        let end = integrate(rhs, &y0, t, &opts)?.end;
        let (p, jm) = end.split_at(n);
        Ok((p.to_vec(), jm.chunks(n).map(|r| r.to_vec()).collect()))
    }
}

impl ContactMap for FlowMap {
    fn dim(&self) -> usize {
        self.field.len()
    }

    fn label(&self) -> String {
        self.label.clone()
    }

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.run(x, self.time)
    }

    fn inverse(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.run(y, -self.time)
    }

    fn differential(&self, x: &[f64]) -> Result<Vec<Vec<f64>>> {
        Ok(self.run_with_differential(x, self.time)?.1)
    }
}

/// `maps[0] ∘ maps[1] ∘ …`.
#[derive(Clone)]
pub struct Composition {
    pub maps: Vec<Arc<dyn ContactMap>>,
}

impl ContactMap for Composition {
    fn dim(&self) -> usize {
        self.maps[0].dim()
    }

    fn label(&self) -> String {
        self.maps.iter().map(|m| m.label()).collect::<Vec<_>>().join("*")
    }

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.maps.iter().rev().try_fold(x.to_vec(), |p, m| m.apply(&p))
    }

    fn inverse(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.maps.iter().try_fold(y.to_vec(), |p, m| m.inverse(&p))
    }

    fn differential(&self, x: &[f64]) -> Result<Vec<Vec<f64>>> {
        let n = self.dim();
        let mut p = x.to_vec();
        let mut acc = identity_matrix(n);
        for m in self.maps.iter().rev() {
            let d = m.differential(&p)?;
            acc = mat_mul(&d, &acc);
            p = m.apply(&p)?;
        }
        Ok(acc)
    }
}

/// `f_* Z (y) = Df(f⁻¹ y) · Z(f⁻¹ y)`, evaluated pointwise. Points where
/// `f⁻¹` fails evaluate to NaN.
pub struct Pushforward<'a> {
    pub map: &'a dyn ContactMap,
    pub field: &'a dyn NumericField,
}

impl NumericField for Pushforward<'_> {
    fn dim(&self) -> usize {
        self.field.dim()
    }

    fn left_at(&self, group: &CarnotGroup, y: &[f64]) -> Vec<f64> {
        group.to_left_coefficients_f64(y, &self.coordinates_at(group, y))
    }

    fn coordinates_at(&self, group: &CarnotGroup, y: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let eval = || -> Result<Vec<f64>> {
            let x = self.map.inverse(y)?;
            let d = self.map.differential(&x)?;
            let v = self.field.coordinates_at(group, &x);
            Ok(d.iter().map(|r| r.iter().zip(&v).map(|(a, b)| a * b).sum()).collect())
        };
        eval().unwrap_or_else(|_| vec![f64::NAN; n])
    }
}

/// Central differences with one Richardson step: `(4 D_{h/2} − D_h) / 3`.
pub fn numeric_differential(f: &dyn ContactMap, x: &[f64], h: f64) -> Result<Vec<Vec<f64>>> {
    let n = f.dim();
    let central = |h: f64| -> Result<Vec<Vec<f64>>> {
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[j] += h;
            xm[j] -= h;
            let (a, b) = (f.apply(&xp)?, f.apply(&xm)?);
            cols.push(a.iter().zip(&b).map(|(p, m)| (p - m) / (2.0 * h)).collect::<Vec<f64>>());
        }
        Ok((0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect())
    };
    let (d1, d2) = (central(h)?, central(h / 2.0)?);
    Ok((0..n).map(|i| (0..n).map(|j| (4.0 * d2[i][j] - d1[i][j]) / 3.0).collect()).collect())
}

/// Largest non-horizontal left-frame component of `Df(x) X_(1,j)(x)` over
/// the sample points and horizontal directions.
pub fn horizontal_defect(group: &CarnotGroup, f: &dyn ContactMap, points: &[Vec<f64>]) -> Result<f64> {
    let d1 = group.algebra().strata()[0];
    let mut worst: f64 = 0.0;
    for x in points {
        let d = f.differential(x)?;
        let fx = f.apply(x)?;
        let frame = group.left_frame_matrix_f64(x);
        for j in 0..d1 {
            let v: Vec<f64> = d.iter().map(|r| (0..r.len()).map(|c| r[c] * frame[c][j]).sum()).collect();
            let left = group.to_left_coefficients_f64(&fx, &v);
            worst = worst.max(left[d1..].iter().map(|c| c.abs()).fold(0.0, f64::max));
        }
    }
    Ok(worst)
}

/// Errors with [`CarnotError::NotContact`] when the horizontal defect
/// exceeds `tol`.
pub fn check_contact(group: &CarnotGroup, f: &dyn ContactMap, points: &[Vec<f64>], tol: f64) -> Result<f64> {
    let defect = horizontal_defect(group, f, points)?;
    if defect > tol {
        return Err(CarnotError::NotContact(defect));
    }
    Ok(defect)
}

/// Gauge distance `‖a⁻¹ b‖`.
pub fn gauge_distance(group: &CarnotGroup, a: &[f64], b: &[f64]) -> f64 {
    group.gauge(&group.product_f64(&group.inverse_f64(a), b))
}

/// Distance between `φ^t_{f_*Z}(f(x))` and `f(φ^t_Z(x))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConjugacyReport {
    /// Gauge distance; it is only Hölder in the coordinates, so rounding
    /// in a layer-`l` coordinate shows up at its `1/l` power.
    pub gauge: f64,
    /// Largest coordinate difference.
    pub coordinate: f64,
}

pub fn verify_conjugacy(
    group: &CarnotGroup,
    f: &dyn ContactMap,
    z: &dyn NumericField,
    x: &[f64],
    t: f64,
    opts: &OdeOptions,
) -> Result<ConjugacyReport> {
    let push = Pushforward { map: f, field: z };
    let lhs = flow(group, &push, &f.apply(x)?, t, opts)?;
    let rhs = f.apply(&flow(group, z, x, t, opts)?)?;
    if lhs.iter().any(|v| !v.is_finite()) {
        return Err(CarnotError::NotInvertible(format!("{} along the flow", f.label())));
    }
    Ok(ConjugacyReport {
        gauge: gauge_distance(group, &lhs, &rhs),
        coordinate: lhs.iter().zip(&rhs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max),
    })
}

/// `t ↦ φ^{t_1}_{X_1} ∘ … ∘ φ^{t_n}_{X_n}(p)`.
pub struct FlowChart<'a> {
    pub group: &'a CarnotGroup,
    pub fields: Vec<&'a dyn NumericField>,
    pub base: Vec<f64>,
    pub options: OdeOptions,
    pub newton_tol: f64,
    pub fd_step: f64,
}

impl<'a> FlowChart<'a> {
    /// Errors unless the field values at `base` are linearly independent.
    pub fn new(group: &'a CarnotGroup, fields: Vec<&'a dyn NumericField>, base: Vec<f64>) -> Result<Self> {
        let n = group.dim();
        if fields.len() != n {
            return Err(CarnotError::DimensionMismatch { expected: n, got: fields.len() });
        }
        let m = DMatrix::from_fn(n, n, |i, j| fields[j].coordinates_at(group, &base)[i]);
        let sv = m.singular_values();
        let (max, min) = (sv.max(), sv.min());
        if !(min > 1e-12 * max.max(1e-300)) {
            return Err(CarnotError::NotInvertible("chart fields are dependent at the base point".into()));
        }
        Ok(FlowChart { group, fields, base, options: OdeOptions::default(), newton_tol: 1e-12, fd_step: 1e-6 })
    }

    pub fn forward(&self, t: &[f64]) -> Result<Vec<f64>> {
        let mut p = self.base.clone();
        for (i, field) in self.fields.iter().enumerate().rev() {
            p = flow(self.group, *field, &p, t[i], &self.options)?;
        }
        Ok(p)
    }

    /// Central-difference Jacobian of [`FlowChart::forward`].
    pub fn jacobian(&self, t: &[f64]) -> Result<DMatrix<f64>> {
        let n = t.len();
        let h = self.fd_step;
        let mut m = DMatrix::zeros(n, n);
        for j in 0..n {
            let mut tp = t.to_vec();
            let mut tm = t.to_vec();
            tp[j] += h;
            tm[j] -= h;
            let (a, b) = (self.forward(&tp)?, self.forward(&tm)?);
            for i in 0..n {
                m[(i, j)] = (a[i] - b[i]) / (2.0 * h);
            }
        }
        Ok(m)
    }

    /// Damped Newton for `forward(t) = q`, started at `guess` (or 0).
    pub fn inverse(&self, q: &[f64], guess: Option<&[f64]>) -> Result<Vec<f64>> {
        let n = q.len();
        let mut t = guess.map_or_else(|| vec![0.0; n], <[f64]>::to_vec);
        let resid = |t: &[f64]| -> Result<Vec<f64>> {
            Ok(self.forward(t)?.iter().zip(q).map(|(a, b)| a - b).collect())
        };
        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut r = resid(&t)?;
        for _ in 0..50 {
            if norm(&r) <= self.newton_tol {
                return Ok(t);
            }
            let j = self.jacobian(&t)?;
            let step = j
                .lu()
                .solve(&nalgebra::DVector::from_column_slice(&r))
                .ok_or_else(|| CarnotError::NewtonDiverged("singular chart Jacobian".into()))?;
            let mut lambda = 1.0;
            loop {
                let cand: Vec<f64> = (0..n).map(|i| t[i] - lambda * step[i]).collect();
                if let Ok(rc) = resid(&cand) {
                    if norm(&rc) < norm(&r) || lambda < 1e-3 {
                        t = cand;
                        r = rc;
                        break;
                    }
                }
                lambda /= 2.0;
                if lambda < 1e-4 {
                    // Stagnation at the noise floor of the forward map.
                    if norm(&r) <= 1e3 * self.newton_tol {
                        return Ok(t);
                    }
                    return Err(CarnotError::NewtonDiverged(format!("no descent at residual {:e}", norm(&r))));
                }
            }
        }
        if norm(&r) <= 1e3 * self.newton_tol {
            return Ok(t);
        }
        Err(CarnotError::NewtonDiverged(format!("residual {:e} after 50 iterations", norm(&r))))
    }

    /// Half the smallest radius `r_k = r_min 2^k ≤ r_max` at which the
    /// Jacobian's condition number at a corner `±r` exceeds `10³`, or
    /// `r_max` if none does.
    pub fn parameter_radius(&self, r_min: f64, r_max: f64) -> Result<f64> {
        let n = self.base.len();
        let mut r = r_min;
        while r <= r_max {
            for corner in 0..(1usize << n) {
                let t: Vec<f64> = (0..n).map(|i| if corner >> i & 1 == 1 { r } else { -r }).collect();
                let sv = self.jacobian(&t)?.singular_values();
                if sv.max() > 1e3 * sv.min() {
                    return Ok(r / 2.0);
                }
            }
            r *= 2.0;
        }
        Ok(r_max)
    }
}

/// Outcome of the identity-in-chart comparison.
#[derive(Clone, Debug)]
pub struct ChartReport {
    pub points: usize,
    pub max_error: f64,
    /// Parameter and error at each grid point.
    pub errors: Vec<(Vec<f64>, f64)>,
}

/// Sup over the grid `{−r, …, r}^n` (`m` points per axis) of
/// `|ψ⁻¹(f(φ(t))) − t|`, where `φ` is the chart at `p` from `fields` and
/// `ψ` the chart at `f(p)` from their pushforwards.
pub fn verify_identity_in_chart(
    group: &CarnotGroup,
    f: &dyn ContactMap,
    p: &[f64],
    fields: &[&dyn NumericField],
    radius: f64,
    m: usize,
) -> Result<ChartReport> {
    let n = group.dim();
    let phi = FlowChart::new(group, fields.to_vec(), p.to_vec())?;
    let pushed: Vec<Pushforward> = fields.iter().map(|z| Pushforward { map: f, field: *z }).collect();
    let psi = FlowChart::new(group, pushed.iter().map(|z| z as &dyn NumericField).collect(), f.apply(p)?)?;
    let axis: Vec<f64> =
        (0..m).map(|i| if m == 1 { 0.0 } else { -radius + 2.0 * radius * i as f64 / (m - 1) as f64 }).collect();
    let mut idx = vec![0usize; n];
    let mut max_error: f64 = 0.0;
    let mut errors = Vec::new();
    loop {
        let t: Vec<f64> = idx.iter().map(|&i| axis[i]).collect();
        let q = f.apply(&phi.forward(&t)?)?;
        let back = psi.inverse(&q, None)?;
        let e = back.iter().zip(&t).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        max_error = max_error.max(e);
        errors.push((t, e));
        let mut a = n;
        loop {
            if a == 0 {
                return Ok(ChartReport { points: errors.len(), max_error, errors });
            }
            a -= 1;
            idx[a] += 1;
            if idx[a] < m {
                break;
            }
            idx[a] = 0;
        }
    }
}

fn identity_matrix(n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
}

fn mat_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = b[0].len();
    a.iter().map(|r| (0..n).map(|j| r.iter().zip(b).map(|(x, row)| x * row[j]).sum()).collect()).collect()
}
