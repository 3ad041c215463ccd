//! Functions, forms and vector fields sampled on a tensor Gauss grid.

use std::collections::BTreeMap;

use crate::error::{CarnotError, Result};
use crate::group::{CarnotGroup, PolyVectorField};
use crate::quadrature::TensorGrid;

use super::weight::mask_weight;
use super::{bits, wedge_sign, FormBasis, NumForm, PolyForm, Weight};

/// Default per-axis order, overridable with `CARNOT_GRID_ORDER`.
pub fn default_grid_order() -> usize {
    std::env::var("CARNOT_GRID_ORDER").ok().and_then(|s| s.parse().ok()).filter(|&m| m >= 2).unwrap_or(8)
}

/// Barycentric Lagrange interpolation through the nodes of a tensor grid.
#[derive(Clone, Debug)]
pub struct Interpolator {
    axes: Vec<(Vec<f64>, Vec<f64>)>,
}

impl Interpolator {
    pub fn new(grid: &TensorGrid) -> Self {
        let axes = grid
            .axes
            .iter()
            .map(|r| {
                let x = &r.nodes;
                let w: Vec<f64> = (0..x.len())
                    .map(|j| 1.0 / (0..x.len()).filter(|&k| k != j).map(|k| x[j] - x[k]).product::<f64>())
                    .collect();
                (x.clone(), w)
            })
            .collect();
        Interpolator { axes }
    }

    /// Lagrange basis values of one axis at `t`.
    fn basis(&self, axis: usize, t: f64) -> Vec<f64> {
        let (x, w) = &self.axes[axis];
        if let Some(j) = x.iter().position(|&xj| xj == t) {
            let mut e = vec![0.0; x.len()];
            e[j] = 1.0;
            return e;
        }
        let terms: Vec<f64> = x.iter().zip(w).map(|(xj, wj)| wj / (t - xj)).collect();
        let total: f64 = terms.iter().sum();
        terms.iter().map(|v| v / total).collect()
    }

    /// Interpolated value at `p` of nodal `values` (grid order, last axis fastest).
    pub fn eval(&self, values: &[f64], p: &[f64]) -> f64 {
        let ls: Vec<Vec<f64>> = (0..self.axes.len()).map(|a| self.basis(a, p[a])).collect();
        let mut acc = values.to_vec();
        // Contract the last axis first.
        for a in (0..ls.len()).rev() {
            let m = ls[a].len();
            acc = acc.chunks(m).map(|c| c.iter().zip(&ls[a]).map(|(v, l)| v * l).sum()).collect();
        }
        acc[0]
    }
}

#[derive(Clone, Debug)]
pub struct SampledFunction {
    pub grid: TensorGrid,
    pub values: Vec<f64>,
}

impl SampledFunction {
    pub fn sample(grid: &TensorGrid, f: impl Fn(&[f64]) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        grid.for_each(|x, _| values.push(f(x)));
        SampledFunction { grid: grid.clone(), values }
    }

    pub fn integrate(&self) -> f64 {
        let mut acc = 0.0;
        let mut i = 0;
        self.grid.for_each(|_, w| {
            acc += w * self.values[i];
            i += 1;
        });
        acc
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn interpolate(&self, p: &[f64]) -> f64 {
        Interpolator::new(&self.grid).eval(&self.values, p)
    }
}

/// Vector field given by its coordinate components at the grid nodes.
#[derive(Clone, Debug)]
pub struct SampledVectorField {
    pub grid: TensorGrid,
    pub components: Vec<Vec<f64>>,
}

impl SampledVectorField {
    pub fn sample(grid: &TensorGrid, f: impl Fn(&[f64]) -> Vec<f64>) -> Self {
        let n = grid.dim();
        let mut components = vec![Vec::with_capacity(grid.len()); n];
        grid.for_each(|x, _| {
            for (c, v) in components.iter_mut().zip(f(x)) {
                c.push(v);
            }
        });
        SampledVectorField { grid: grid.clone(), components }
    }

    pub fn from_field(grid: &TensorGrid, z: &PolyVectorField) -> Self {
        let c = z.compile();
        Self::sample(grid, |x| c.eval(x))
    }

    /// Components at node `i`.
    pub fn at(&self, i: usize) -> Vec<f64> {
        self.components.iter().map(|c| c[i]).collect()
    }

    /// Components in the left-invariant frame at every node.
    pub fn left_coefficients(&self, group: &CarnotGroup) -> Vec<Vec<f64>> {
        let nodes = self.grid.nodes();
        nodes.iter().enumerate().map(|(i, x)| group.to_left_coefficients_f64(x, &self.at(i))).collect()
    }
}

/// A form with one nodal value array per nonzero coframe component.
#[derive(Clone, Debug)]
pub struct SampledForm {
    pub grid: TensorGrid,
    n: usize,
    degree: usize,
    basis: FormBasis,
    comps: BTreeMap<u64, Vec<f64>>,
}

impl SampledForm {
    pub fn zero(grid: &TensorGrid, degree: usize, basis: FormBasis) -> Self {
        SampledForm { grid: grid.clone(), n: grid.dim(), degree, basis, comps: BTreeMap::new() }
    }

    pub fn from_poly(grid: &TensorGrid, omega: &PolyForm) -> Result<Self> {
        if grid.dim() != omega.dim() {
            return Err(CarnotError::DimensionMismatch { expected: omega.dim(), got: grid.dim() });
        }
        let mut out = Self::zero(grid, omega.degree(), omega.basis());
        let nodes = grid.nodes();
        for (mask, c) in omega.components() {
            let cc = c.compile();
            out.comps.insert(mask, nodes.iter().map(|x| cc.eval(x)).collect());
        }
        Ok(out)
    }

    /// Builds a form from its pointwise values.
    pub fn sample(grid: &TensorGrid, degree: usize, basis: FormBasis, f: impl Fn(&[f64]) -> NumForm) -> Self {
        let nodes = grid.nodes();
        let values: Vec<NumForm> = nodes.iter().map(|x| f(x)).collect();
        Self::from_pointwise(grid, degree, basis, &values)
    }

    fn from_pointwise(grid: &TensorGrid, degree: usize, basis: FormBasis, values: &[NumForm]) -> Self {
        let mut out = Self::zero(grid, degree, basis);
        let len = values.len();
        for (i, v) in values.iter().enumerate() {
            for (mask, c) in v.components() {
                out.comps.entry(mask).or_insert_with(|| vec![0.0; len])[i] = *c;
            }
        }
        out
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn basis(&self) -> FormBasis {
        self.basis
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn component(&self, mask: u64) -> Option<&[f64]> {
        self.comps.get(&mask).map(Vec::as_slice)
    }

    /// The form at node `i`.
    pub fn at(&self, i: usize) -> NumForm {
        let mut f = NumForm::zero(self.n, self.degree, self.basis);
        for (m, v) in &self.comps {
            f.set(*m, v[i]);
        }
        f
    }

    fn pointwise(&self) -> Vec<NumForm> {
        (0..self.len()).map(|i| self.at(i)).collect()
    }

    pub fn sup_norm(&self) -> f64 {
        self.comps.values().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn wedge(&self, other: &SampledForm) -> Result<SampledForm> {
        if self.basis != other.basis || self.len() != other.len() {
            return Err(CarnotError::DimensionMismatch { expected: self.len(), got: other.len() });
        }
        let degree = (self.degree + other.degree).min(self.n);
        let mut out = Self::zero(&self.grid, degree, self.basis);
        if self.degree + other.degree > self.n {
            return Ok(out);
        }
        for (ma, va) in &self.comps {
            for (mb, vb) in &other.comps {
                if ma & mb != 0 {
                    continue;
                }
                let s = wedge_sign(*ma, *mb) as f64;
                let e = out.comps.entry(ma | mb).or_insert_with(|| vec![0.0; va.len()]);
                for i in 0..va.len() {
                    e[i] += s * va[i] * vb[i];
                }
            }
        }
        Ok(out)
    }

    /// `i_Z ω` pointwise; `Z` is converted to the form's frame.
    pub fn interior(&self, group: &CarnotGroup, z: &SampledVectorField) -> Result<SampledForm> {
        if z.grid.len() != self.len() {
            return Err(CarnotError::DimensionMismatch { expected: self.len(), got: z.grid.len() });
        }
        let coeffs: Vec<Vec<f64>> = match self.basis {
            FormBasis::Coordinate => (0..self.len()).map(|i| z.at(i)).collect(),
            FormBasis::LeftInvariant => z.left_coefficients(group),
        };
        let values: Vec<NumForm> = self.pointwise().iter().zip(&coeffs).map(|(f, v)| f.interior(v)).collect();
        Ok(Self::from_pointwise(&self.grid, self.degree.saturating_sub(1), self.basis, &values))
    }

    /// Re-expresses the form in the left-invariant coframe, node by node.
    pub fn to_left_invariant(&self, group: &CarnotGroup) -> SampledForm {
        if self.basis == FormBasis::LeftInvariant {
            return self.clone();
        }
        let nodes = self.grid.nodes();
        let values: Vec<NumForm> = nodes
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let f = group.left_frame_matrix_f64(x);
                super::change_basis(&self.at(i), &f, FormBasis::LeftInvariant)
            })
            .collect();
        Self::from_pointwise(&self.grid, self.degree, FormBasis::LeftInvariant, &values)
    }

    /// Components whose magnitude exceeds `tol · sup‖ω‖` somewhere on the grid.
    fn significant(&self, tol: f64) -> Vec<u64> {
        let cut = tol * self.sup_norm();
        self.comps.iter().filter(|(_, v)| v.iter().any(|x| x.abs() > cut)).map(|(m, _)| *m).collect()
    }

    /// Vertical at every node, to `1e−10` relative to the sup norm.
    pub fn is_vertical(&self, group: &CarnotGroup) -> Result<bool> {
        if self.degree != 1 {
            return Err(CarnotError::DimensionMismatch { expected: 1, got: self.degree });
        }
        let s = self.to_left_invariant(group);
        let d1 = group.algebra().strata()[0];
        Ok(s.significant(1e-10).iter().all(|m| m.trailing_zeros() as usize >= d1))
    }

    /// Largest weight of a significant component over the grid; `Mixed` only
    /// reports that components of different weights occur.
    pub fn weight(&self, group: &CarnotGroup) -> Result<(i32, Weight)> {
        let s = self.to_left_invariant(group);
        let masks = s.significant(1e-10);
        if masks.is_empty() {
            return Err(CarnotError::ZeroForm);
        }
        let ws: Vec<i32> = masks.iter().map(|m| mask_weight(group.weights(), *m)).collect();
        let max = *ws.iter().max().unwrap();
        let tag = if ws.iter().all(|w| *w == max) { Weight::Homogeneous(max) } else { Weight::Mixed };
        Ok((max, tag))
    }

    /// `∫ ω` for a top-degree form; the σ and dx volume forms agree.
    pub fn integrate_top(&self) -> Result<f64> {
        if self.degree != self.n {
            return Err(CarnotError::DimensionMismatch { expected: self.n, got: self.degree });
        }
        let Some(v) = self.comps.get(&super::full_mask(self.n)) else { return Ok(0.0) };
        let mut acc = 0.0;
        let mut i = 0;
        self.grid.for_each(|_, w| {
            acc += w * v[i];
            i += 1;
        });
        Ok(acc)
    }

    /// Indices of the coframe monomials stored.
    pub fn masks(&self) -> impl Iterator<Item = u64> + '_ {
        self.comps.keys().copied()
    }

    /// Names of stored components, e.g. `σ1∧σ3`.
    pub fn component_names(&self) -> Vec<String> {
        self.comps.keys().map(|m| super::basis_name(self.basis, *m)).collect()
    }

    /// Number of basis elements in each component's mask.
    pub fn check_masks(&self) -> bool {
        self.comps.keys().all(|m| bits(*m).count() == self.degree)
    }
}
