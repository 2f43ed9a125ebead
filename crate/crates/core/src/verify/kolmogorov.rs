//! Picard iteration for the backward Kolmogorov integral equation on one
//! block, with Ornstein–Uhlenbeck expectations by Gauss–Hermite quadrature.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{psd_factor, Mat2, Vec2};
use crate::models::{DriftSpec, SpectralModel};
use crate::quad;
use crate::spectral::{q_block, semigroup_phys, EigenBlock};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KolmogorovGrid {
    /// The box is `[−half_width, half_width]^d`.
    pub half_width: f64,
    /// Nodes per dimension.
    pub nodes: usize,
    pub time_nodes: usize,
    pub hermite_order: usize,
}

impl Default for KolmogorovGrid {
    fn default() -> Self {
        Self { half_width: 3.0, nodes: 33, time_nodes: 21, hermite_order: 21 }
    }
}

/// Tensor grid with multilinear interpolation; points outside the box are
/// extrapolated linearly from the boundary cell.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct BoxGrid {
    pub dim: usize,
    pub lo: f64,
    pub step: f64,
    pub n: usize,
}

impl BoxGrid {
    fn new(dim: usize, half_width: f64, n: usize) -> Self {
        Self { dim, lo: -half_width, step: 2.0 * half_width / (n - 1) as f64, n }
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn node(&self, idx: usize) -> Vec2 {
        let c = |i: usize| self.lo + i as f64 * self.step;
        if self.dim == 1 {
            Vec2::new(c(idx), 0.0)
        } else {
            Vec2::new(c(idx % self.n), c(idx / self.n))
        }
    }

    pub fn contains(&self, x: &Vec2) -> bool {
        let hi = -self.lo;
        (0..self.dim).all(|k| x[k] >= self.lo - 1e-12 && x[k] <= hi + 1e-12)
    }

    fn locate(&self, v: f64) -> (usize, f64) {
        let u = (v - self.lo) / self.step;
        let i = (u.floor().max(0.0) as usize).min(self.n - 2);
        (i, u - i as f64)
    }

    /// Corner indices and multilinear weights of `x`; in one dimension the
    /// last two weights are zero.
    fn stencil(&self, x: &Vec2) -> [(usize, f64); 4] {
        let (i, a) = self.locate(x[0]);
        if self.dim == 1 {
            return [(i, 1.0 - a), (i + 1, a), (i, 0.0), (i, 0.0)];
        }
        let (j, b) = self.locate(x[1]);
        let k = j * self.n + i;
        [(k, (1.0 - a) * (1.0 - b)), (k + 1, a * (1.0 - b)), (k + self.n, (1.0 - a) * b), (k + self.n + 1, a * b)]
    }

    pub fn interp<T>(&self, vals: &[T], x: &Vec2) -> T
    where
        T: Copy + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T>,
    {
        let w = self.stencil(x);
        vals[w[0].0] * w[0].1 + vals[w[1].0] * w[1].1 + vals[w[2].0] * w[2].1 + vals[w[3].0] * w[3].1
    }

    /// Columns `∂/∂x₀`, `∂/∂x₁` at every node by centered differences,
    /// one-sided on the boundary.
    pub fn gradients(&self, vals: &[Vec2]) -> Vec<Mat2> {
        let n = self.n;
        let diff = |lo: usize, hi: usize, span: f64| (vals[hi] - vals[lo]) / (span * self.step);
        (0..self.len())
            .map(|k| {
                let (i, j) = if self.dim == 1 { (k, 0) } else { (k % n, k / n) };
                let dx = |i: usize, base: usize, stride: usize| {
                    if i == 0 {
                        diff(base, base + stride, 1.0)
                    } else if i == n - 1 {
                        diff(base - stride, base, 1.0)
                    } else {
                        diff(base - stride, base + stride, 2.0)
                    }
                };
                let c0 = dx(i, k, 1);
                let c1 = if self.dim == 2 { dx(j, k, n) } else { Vec2::zeros() };
                Mat2::from_columns(&[c0, c1])
            })
            .collect()
    }
}

/// Values of `U_n` on a box and time grid, with diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct KolmogorovSolution {
    pub dim: usize,
    pub t_end: f64,
    pub times: Vec<f64>,
    pub(crate) grid: BoxGrid,
    /// `[time][node]`.
    pub values: Vec<Vec<Vec2>>,
    pub(crate) grads: Vec<Vec<Mat2>>,
    pub iterations: usize,
    /// `sup |U^{k+1} − U^k|` per iteration.
    pub increments: Vec<f64>,
    pub sup_norm: f64,
    pub grad_sup_norm: f64,
    /// `sup |Map(U) − U|` after convergence.
    pub residual: f64,
    /// Declared `‖B_n‖_{C_b^θ}` of the drift on the block.
    pub drift_norm: f64,
    /// `(sup|U| + sup|DU|) / ‖B_n‖_{C_b^θ}`.
    pub m_t: f64,
}

impl KolmogorovSolution {
    fn time_weights(&self, t: f64) -> (usize, f64) {
        let dt = self.times[1] - self.times[0];
        let u = (t / dt).clamp(0.0, (self.times.len() - 1) as f64);
        let i = (u.floor() as usize).min(self.times.len() - 2);
        (i, u - i as f64)
    }

    /// `U(t, x)`, linear in time between grid times.
    pub fn eval(&self, t: f64, x: &Vec2) -> Vec2 {
        let (i, a) = self.time_weights(t);
        self.grid.interp(&self.values[i], x) * (1.0 - a) + self.grid.interp(&self.values[i + 1], x) * a
    }

    /// `D_xU(t, x)`, columns are partial derivatives.
    pub fn jacobian(&self, t: f64, x: &Vec2) -> Mat2 {
        let (i, a) = self.time_weights(t);
        self.grid.interp(&self.grads[i], x) * (1.0 - a) + self.grid.interp(&self.grads[i + 1], x) * a
    }

    pub fn contains(&self, x: &Vec2) -> bool {
        self.grid.contains(x)
    }
}

struct Setup {
    block: EigenBlock,
    grid: BoxGrid,
    times: Vec<f64>,
    /// `R(lag)f(node) = Σ w f[idx]` as merged sparse rows, `[lag][node]`.
    rows: Vec<Vec<Vec<(u32, f64)>>>,
    forcing: Vec<f64>,
}

fn setup(model: &SpectralModel, drift: &DriftSpec, t_end: f64, g: &KolmogorovGrid) -> Result<Setup> {
    if !(t_end > 0.0) || g.nodes < 3 || g.time_nodes < 2 || g.hermite_order == 0 || !(g.half_width > 0.0) {
        return Err(Error::InvalidParameter(format!("bad Kolmogorov grid {g:?} or horizon {t_end}")));
    }
    let block = model.blocks_upto(1)?.remove(0);
    let dim = block.dim;
    let grid = BoxGrid::new(dim, g.half_width, g.nodes);
    let dt = t_end / (g.time_nodes - 1) as f64;
    let times: Vec<f64> = (0..g.time_nodes).map(|i| i as f64 * dt).collect();
    let rule = quad::hermite_normal(g.hermite_order);
    let gh: Vec<(Vec2, f64)> = if dim == 1 {
        rule.iter().map(|&(z, w)| (Vec2::new(z, 0.0), w)).collect()
    } else {
        rule.iter().flat_map(|&(z0, w0)| rule.iter().map(move |&(z1, w1)| (Vec2::new(z0, z1), w0 * w1))).collect()
    };
    let rows = times
        .iter()
        .map(|&s| -> Result<Vec<Vec<(u32, f64)>>> {
            let (sg, l) = (semigroup_phys(&block, s), psd_factor(&q_block(&block, s, 1e-12)?));
            Ok((0..grid.len())
                .into_par_iter()
                .map(|k| {
                    let mean = sg * grid.node(k);
                    let mut row: Vec<(u32, f64)> =
                        gh.iter().flat_map(|(z, w)| grid.stencil(&(mean + l * z)).map(|(i, c)| (i as u32, c * w))).filter(|e| e.1 != 0.0).collect();
                    row.sort_unstable_by_key(|e| e.0);
                    row.dedup_by(|b, a| {
                        if a.0 == b.0 {
                            a.1 += b.1;
                            true
                        } else {
                            false
                        }
                    });
                    row
                })
                .collect())
        })
        .collect::<Result<Vec<_>>>()?;
    let blocks = std::slice::from_ref(&block);
    let forcing = (0..grid.len()).map(|k| drift.forcing_vec(blocks, &[grid.node(k)])[0]).collect();
    Ok(Setup { block, grid, times, rows, forcing })
}

impl Setup {
    /// `Map(U)(t_i, ·) = Σ_j w_j R(t_j − t_i) F_j` with trapezoid weights.
    fn apply(&self, rhs: &[Vec<Vec2>]) -> Vec<Vec<Vec2>> {
        let nt = self.times.len();
        let dt = self.times[1] - self.times[0];
        (0..nt)
            .map(|i| {
                if i == nt - 1 {
                    return vec![Vec2::zeros(); self.grid.len()];
                }
                (0..self.grid.len())
                    .into_par_iter()
                    .map(|k| {
                        let mut acc = Vec2::zeros();
                        for (j, r) in rhs.iter().enumerate().skip(i) {
                            let w = if j == i || j == nt - 1 { 0.5 * dt } else { dt };
                            let v = if j == i { r[k] } else { self.rows[j - i][k].iter().fold(Vec2::zeros(), |e, &(idx, c)| e + r[idx as usize] * c) };
                            acc += v * w;
                        }
                        acc
                    })
                    .collect()
            })
            .collect()
    }
}

fn sup_diff(a: &[Vec<Vec2>], b: &[Vec<Vec2>]) -> f64 {
    a.iter().flatten().zip(b.iter().flatten()).map(|(x, y)| (x - y).amax()).fold(0.0, f64::max)
}

fn picard(st: &Setup, t_end: f64, drift: &DriftSpec, rhs_of: impl Fn(&Setup, &[Vec<Vec2>], &[Vec<Mat2>]) -> Vec<Vec<Vec2>>) -> Result<KolmogorovSolution> {
    let nt = st.times.len();
    let mut u = vec![vec![Vec2::zeros(); st.grid.len()]; nt];
    let mut grads: Vec<Vec<Mat2>> = u.iter().map(|v| st.grid.gradients(v)).collect();
    let mut increments = Vec::new();
    let mut iterations = 0;
    for it in 1..=100 {
        let next = st.apply(&rhs_of(st, &u, &grads));
        let inc = sup_diff(&next, &u);
        u = next;
        grads = u.iter().map(|v| st.grid.gradients(v)).collect();
        iterations = it;
        if let Some(&prev) = increments.last() {
            let ratio = inc / prev;
            if prev > 1e-12 && ratio >= 1.0 {
                return Err(Error::NoContraction { ratio, iteration: it });
            }
        }
        increments.push(inc);
        if inc < 1e-8 {
            break;
        }
    }
    let residual = sup_diff(&st.apply(&rhs_of(st, &u, &grads)), &u);
    let sup_norm = u.iter().flatten().map(|v| v.amax()).fold(0.0, f64::max);
    let grad_sup_norm = grads.iter().flatten().map(|m| m.amax()).fold(0.0, f64::max);
    let drift_norm = drift.mode_holder_norm(&st.block);
    let m_t = if drift_norm > 0.0 { (sup_norm + grad_sup_norm) / drift_norm } else { 0.0 };
    Ok(KolmogorovSolution {
        dim: st.block.dim,
        t_end,
        times: st.times.clone(),
        grid: st.grid.clone(),
        values: u,
        grads,
        iterations,
        increments,
        sup_norm,
        grad_sup_norm,
        residual,
        drift_norm,
        m_t,
    })
}

/// Vector form: `U(t,x) = ∫_t^T R(r−t)(DU(r)L̃B + B)(x) dr` on the first
/// block of `model`.
pub fn solve_kolmogorov_picard(model: &SpectralModel, drift: &DriftSpec, t_end: f64, grid: &KolmogorovGrid) -> Result<KolmogorovSolution> {
    let st = setup(model, drift, t_end, grid)?;
    let dir = st.block.ltilde * st.block.noise_dir;
    picard(&st, t_end, drift, |st, _u, grads| {
        grads.iter().map(|gt| (0..st.grid.len()).map(|k| gt[k] * dir * st.forcing[k] + st.block.noise_dir * st.forcing[k]).collect()).collect()
    })
}

/// Scalar form for `U^v = ⟨U, v⟩`:
/// `U^v(t,x) = ∫_t^T R(r−t)(⟨G̃*∇U^v, 𝒦B̃⟩ + ⟨B, v⟩)(x) dr`. The value is
/// stored in the first component.
pub fn solve_kolmogorov_scalar(model: &SpectralModel, drift: &DriftSpec, t_end: f64, grid: &KolmogorovGrid, v: Vec2) -> Result<KolmogorovSolution> {
    let st = setup(model, drift, t_end, grid)?;
    let (gt, k) = (st.block.noise_dir, st.block.k_mult);
    picard(&st, t_end, drift, |st, _u, grads| {
        grads
            .iter()
            .map(|g| {
                (0..st.grid.len())
                    .map(|n| {
                        let grad_v = g[n].row(0).transpose();
                        Vec2::new(gt.dot(&grad_v) * k * st.forcing[n] + (gt * st.forcing[n]).dot(&v), 0.0)
                    })
                    .collect()
            })
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::Profile;

    #[test]
    fn zero_drift_gives_zero() {
        let model = SpectralModel::damped_wave(0.4, 1.0, 0.1, 0.15, 0.9, 1);
        let g = KolmogorovGrid { nodes: 9, time_nodes: 5, hermite_order: 5, ..Default::default() };
        let s = solve_kolmogorov_picard(&model, &DriftSpec::zero(), 0.1, &g).unwrap();
        assert_eq!(s.iterations, 1);
        assert_eq!(s.sup_norm, 0.0);
    }

    #[test]
    fn linear_drift_matches_closed_form() {
        // heat mode with λ = 1: A = −1, L̃ = 1, B(x) = L x
        let l = 0.7;
        let model = SpectralModel::heat(1, 1.0, 0.0, 0.0, 0.9, 1);
        let drift = DriftSpec::mode_coefficients(l, 0.0, Profile::Linear, 1.0);
        let g = KolmogorovGrid { half_width: 2.0, nodes: 21, time_nodes: 161, hermite_order: 11 };
        let t_end = 0.2;
        let s = solve_kolmogorov_picard(&model, &drift, t_end, &g).unwrap();
        let k = 1.0 - l;
        for (i, &t) in s.times.iter().enumerate() {
            let phi = l / k * (1.0 - (-k * (t_end - t)).exp());
            for n in 0..s.grid.len() {
                let x = s.grid.node(n)[0];
                assert!((s.values[i][n][0] - phi * x).abs() < 1e-6, "t = {t}, x = {x}");
            }
        }
    }

    #[test]
    fn strong_linear_drift_over_long_horizon_does_not_contract() {
        let model = SpectralModel::heat(1, 1.0, 0.0, 0.0, 0.9, 1);
        let drift = DriftSpec::mode_coefficients(50.0, 0.0, Profile::Linear, 1.0);
        let g = KolmogorovGrid { nodes: 11, time_nodes: 11, hermite_order: 7, ..Default::default() };
        let err = solve_kolmogorov_picard(&model, &drift, 1.0, &g).unwrap_err();
        assert!(matches!(err, Error::NoContraction { .. }));
    }

    #[test]
    fn scalar_form_agrees_with_vector_form() {
        let model = SpectralModel::damped_wave(0.4, 1.0, 0.1, 0.15, 0.9, 1);
        let drift = DriftSpec::mode_coefficients(1.0, 0.0, Profile::HolderSign { theta: 0.9 }, 0.9);
        let g = KolmogorovGrid { nodes: 13, time_nodes: 9, hermite_order: 9, ..Default::default() };
        let vec = solve_kolmogorov_picard(&model, &drift, 0.1, &g).unwrap();
        for (c, v) in [(0, Vec2::new(1.0, 0.0)), (1, Vec2::new(0.0, 1.0))] {
            let sc = solve_kolmogorov_scalar(&model, &drift, 0.1, &g, v).unwrap();
            for (a, b) in vec.values.iter().flatten().zip(sc.values.iter().flatten()) {
                assert!((a[c] - b[0]).abs() < 1e-7);
            }
        }
    }
}
