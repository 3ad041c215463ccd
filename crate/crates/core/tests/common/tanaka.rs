//! Graded prolongation of a stratified algebra by brute-force linear algebra
//! in `f64`. Used only to cross-check the contact solver's per-order kernel
//! dimensions; it shares no code with the solver beyond structure constants.

use carnot::algebra::StratifiedLieAlgebra;
use carnot::rational::q_to_f64;
use nalgebra::DMatrix;

/// Action of a degree-`d` element on `m`, stored per global basis index.
type Action = Vec<Vec<f64>>;

pub struct Prolongation {
    /// `dims[k]` is the dimension of the degree-`k` part, `k ≥ 0`.
    pub dims: Vec<usize>,
}

struct Ctx<'a> {
    alg: &'a StratifiedLieAlgebra,
    c: Vec<Vec<Vec<f64>>>,
    /// `basis[d]` for `d ≥ 0`.
    basis: Vec<Vec<Action>>,
}

impl Ctx<'_> {
    fn space_dim(&self, d: i64) -> usize {
        if d < 0 {
            let l = (-d) as usize;
            if l > self.alg.step() {
                0
            } else {
                self.alg.strata()[l - 1]
            }
        } else {
            self.basis.get(d as usize).map_or(0, Vec::len)
        }
    }

    /// `[v, e_y]` for `v` in the degree-`d` space.
    fn act(&self, d: i64, v: &[f64], y: usize) -> Vec<f64> {
        let ly = self.alg.layer_of(y) as i64;
        let out_dim = self.space_dim(d - ly);
        let mut out = vec![0.0; out_dim];
        if out_dim == 0 {
            return out;
        }
        if d < 0 {
            let l = (-d) as usize;
            let src = self.alg.layer_range(l);
            let dst = self.alg.layer_range(l + ly as usize);
            for (i, a) in src.enumerate() {
                if v[i] == 0.0 {
                    continue;
                }
                for (o, k) in dst.clone().enumerate() {
                    out[o] += v[i] * self.c[a][y][k];
                }
            }
        } else {
            for (b, coef) in v.iter().enumerate() {
                if *coef == 0.0 {
                    continue;
                }
                for (o, val) in self.basis[d as usize][b][y].iter().enumerate() {
                    out[o] += coef * val;
                }
            }
        }
        out
    }
}

/// Dimensions of the degree `0..=k_max` parts of the prolongation.
pub fn prolongation(alg: &StratifiedLieAlgebra, k_max: usize) -> Prolongation {
    let n = alg.dim();
    let c: Vec<Vec<Vec<f64>>> = (0..n)
        .map(|a| (0..n).map(|b| (0..n).map(|k| q_to_f64(&alg.structure_constant(a, b, k))).collect()).collect())
        .collect();
    let mut ctx = Ctx { alg, c, basis: Vec::new() };
    let mut dims = Vec::new();
    for k in 0..=k_max as i64 {
        // Unknown: for each basis vector e_a, its image in the degree-(k − l_a) space.
        let offsets: Vec<usize> = (0..=n)
            .scan(0, |acc, a| {
                let here = *acc;
                if a < n {
                    *acc += ctx.space_dim(k - alg.layer_of(a) as i64);
                }
                Some(here)
            })
            .collect();
        let unknowns = offsets[n];
        let image = |u: &[f64], a: usize| -> Vec<f64> { u[offsets[a]..offsets[a + 1]].to_vec() };
        // Residual u[x,y] − [ux, y] − [x, uy] for all basis pairs.
        let residual = |u: &[f64]| -> Vec<f64> {
            let mut r = Vec::new();
            for x in 0..n {
                for y in x + 1..n {
                    let (lx, ly) = (alg.layer_of(x) as i64, alg.layer_of(y) as i64);
                    let d = k - lx - ly;
                    let mut lhs = vec![0.0; ctx.space_dim(d)];
                    for z in 0..n {
                        let cz = ctx.c[x][y][z];
                        if cz != 0.0 {
                            for (o, v) in image(u, z).iter().enumerate() {
                                lhs[o] += cz * v;
                            }
                        }
                    }
                    let t1 = ctx.act(k - lx, &image(u, x), y);
                    let t2 = ctx.act(k - ly, &image(u, y), x);
                    for o in 0..lhs.len() {
                        r.push(lhs[o] - t1[o] + t2[o]);
                    }
                }
            }
            r
        };
        let rows = residual(&vec![0.0; unknowns]).len();
        // Zero rows pad the system so that V^T is square.
        let mut m = DMatrix::zeros(rows.max(unknowns).max(1), unknowns.max(1));
        for j in 0..unknowns {
            let mut e = vec![0.0; unknowns];
            e[j] = 1.0;
            for (i, v) in residual(&e).into_iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        let svd = m.svd(false, true);
        let vt = svd.v_t.unwrap();
        let tol = 1e-9 * svd.singular_values.max().max(1.0);
        let mut kernel = Vec::new();
        for (i, row) in vt.row_iter().enumerate() {
            let s = svd.singular_values[i];
            if s <= tol && i < unknowns {
                kernel.push(row.iter().copied().collect::<Vec<f64>>());
            }
        }
        dims.push(kernel.len());
        let actions: Vec<Action> = kernel.iter().map(|u| (0..n).map(|a| image(u, a)).collect()).collect();
        let done = actions.is_empty();
        ctx.basis.push(actions);
        if done {
            dims.resize(k_max + 1, 0);
            break;
        }
    }
    Prolongation { dims }
}
