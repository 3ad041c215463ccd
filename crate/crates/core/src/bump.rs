//! Compactly supported test functions adapted to the group structure, and
//! quadrature against them.
//!
//! The test function with center `c` and radius `r` is
//! `φ(x) = Π_a b(u_a)` with `u = δ_{1/r}(c⁻¹·x)`, so its support is the image
//! of the cube `[−1, 1]^n` under `u ↦ c·δ_r(u)`. Integrals `∫ g φ dx` are
//! computed in the `u` variable (left translations preserve Haar measure and
//! `δ_r` has Jacobian `r^ν`) with the bump-adapted Gauss rule.

use crate::error::{CarnotError, Result};
use crate::group::CarnotGroup;
use crate::poly::Poly;
use crate::quadrature::{bump, bump_deriv, bump_rule};

#[derive(Clone, Debug, PartialEq)]
pub struct TestBump {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl TestBump {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(CarnotError::NonPositiveScale(radius));
        }
        Ok(TestBump { center, radius })
    }

    pub fn centered(n: usize, radius: f64) -> Result<Self> {
        Self::new(vec![0.0; n], radius)
    }

    /// `u = δ_{1/r}(c⁻¹ x)`.
    pub fn local(&self, group: &CarnotGroup, x: &[f64]) -> Vec<f64> {
        let y = group.product_f64(&group.inverse_f64(&self.center), x);
        group.dilate_point(1.0 / self.radius, &y)
    }

    /// `x = c·δ_r(u)`.
    pub fn global(&self, group: &CarnotGroup, u: &[f64]) -> Vec<f64> {
        group.product_f64(&self.center, &group.dilate_point(self.radius, u))
    }

    pub fn eval(&self, group: &CarnotGroup, x: &[f64]) -> f64 {
        self.local(group, x).iter().map(|t| bump(*t)).product()
    }

    /// Coordinate polynomials of `u ↦ c·δ_r(u)`.
    pub fn chart(&self, group: &CarnotGroup) -> Vec<Poly<f64>> {
        let n = group.dim();
        let subs: Vec<Poly<f64>> = (0..2 * n)
            .map(|v| {
                if v < n {
                    Poly::constant(self.center[v])
                } else {
                    let w = group.weights()[v - n] as i32;
                    Poly::var(v - n).scale(&self.radius.powi(w))
                }
            })
            .collect();
        group.law().iter().map(|p| p.to_f64().compose(&subs)).collect()
    }

    /// A coordinate box containing the support.
    pub fn support_box(&self, group: &CarnotGroup) -> (Vec<f64>, Vec<f64>) {
        bound_polys(&self.chart(group), &vec![1.0; group.dim()])
    }

    /// Errors unless the support lies in the box `lo..hi`.
    pub fn check_inside(&self, group: &CarnotGroup, lo: &[f64], hi: &[f64]) -> Result<()> {
        let (a, b) = self.support_box(group);
        for i in 0..a.len() {
            if a[i] < lo[i] || b[i] > hi[i] {
                return Err(CarnotError::SupportViolation(format!(
                    "bump at {:?} radius {} leaves the box along x{}",
                    self.center,
                    self.radius,
                    i + 1
                )));
            }
        }
        Ok(())
    }

    /// Quadrature nodes for integrals against `φ` and `X_a φ`.
    pub fn nodes(&self, group: &CarnotGroup, order: usize) -> BumpNodes {
        let n = group.dim();
        let rule = bump_rule(order);
        let jac = self.radius.powi(group.homogeneous_dimension() as i32);
        let scale: Vec<f64> = group.weights().iter().map(|&w| self.radius.powi(-(w as i32))).collect();
        let mut out = BumpNodes::default();
        let mut idx = vec![0usize; n];
        loop {
            let u: Vec<f64> = idx.iter().map(|&i| rule.nodes[i]).collect();
            let w: f64 = idx.iter().map(|&i| rule.weights[i]).product::<f64>() * jac;
            let b: Vec<f64> = u.iter().map(|t| bump(*t)).collect();
            let db: Vec<f64> = u.iter().map(|t| bump_deriv(*t)).collect();
            let phi: f64 = b.iter().product();
            // ∂_c B = b'(u_c) Π_{i≠c} b(u_i)
            let grad: Vec<f64> = (0..n)
                .map(|c| (0..n).map(|i| if i == c { db[i] } else { b[i] }).product())
                .collect();
            let f = group.left_frame_matrix_f64(&u);
            let dphi: Vec<f64> =
                (0..n).map(|a| scale[a] * (0..n).map(|c| f[c][a] * grad[c]).sum::<f64>()).collect();
            out.x.push(self.global(group, &u));
            out.weight.push(w);
            out.phi.push(phi);
            out.dphi.push(dphi);
            let mut a = n;
            loop {
                if a == 0 {
                    return out;
                }
                a -= 1;
                idx[a] += 1;
                if idx[a] < order {
                    break;
                }
                idx[a] = 0;
            }
        }
    }
}

/// Rule order making `∫ g φ` and `∫ g X_a φ` exact when `g` has weighted
/// degree at most `degree` (the frame adds at most `s − 1`).
pub fn order_for_degree(group: &CarnotGroup, degree: u32) -> usize {
    let d = degree as usize + group.step() - 1;
    d.div_ceil(2).max(1) + 3
}

/// Nodes `x_k = c·δ_r(u_k)`, weights (including `r^ν`), and the values of
/// `φ` and of `X_a φ` there.
#[derive(Clone, Debug, Default)]
pub struct BumpNodes {
    pub x: Vec<Vec<f64>>,
    pub weight: Vec<f64>,
    pub phi: Vec<f64>,
    pub dphi: Vec<Vec<f64>>,
}

impl BumpNodes {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// `∫ g φ dx`.
    pub fn integrate(&self, g: impl Fn(&[f64]) -> f64) -> f64 {
        (0..self.len()).map(|k| self.weight[k] * self.phi[k] * g(&self.x[k])).sum()
    }

    /// `∫ g X_a φ dx`.
    pub fn integrate_derivative(&self, a: usize, g: impl Fn(&[f64]) -> f64) -> f64 {
        (0..self.len()).map(|k| self.weight[k] * self.dphi[k][a] * g(&self.x[k])).sum()
    }
}

/// Box containing the image of `|u_i| ≤ half[i]` under the polynomials:
/// constant term plus or minus the sum of the remaining term bounds.
pub fn bound_polys(polys: &[Poly<f64>], half: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut lo = Vec::with_capacity(polys.len());
    let mut hi = Vec::with_capacity(polys.len());
    for p in polys {
        let mut c0 = 0.0;
        let mut spread = 0.0;
        for (m, c) in p.terms() {
            if m.is_one() {
                c0 = *c;
            } else {
                spread += c.abs() * m.0.iter().map(|&(v, e)| half[v as usize].powi(e as i32)).product::<f64>();
            }
        }
        lo.push(c0 - spread);
        hi.push(c0 + spread);
    }
    (lo, hi)
}
