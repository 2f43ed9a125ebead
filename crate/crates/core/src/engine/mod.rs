//! Exponential Euler for the truncated equations with exact
//! Ornstein–Uhlenbeck increments.

mod coupling;
mod ensemble;
mod noise;

pub use coupling::{couple_and_measure, galerkin_convergence, ConvergenceRow, ConvergenceTable, CouplingDiagnostics};
pub use ensemble::{second_moments, simulate_ensemble, MomentCell, MomentTable, PathEnsemble};
pub use noise::{NoiseStream, NormalCursor};

use crate::error::{Error, Result};
use crate::linalg::{psd_factor, symmetrize, Mat2, Vec2};
use crate::models::{DriftSpec, EigenLaw, SpectralModel};
use crate::spectral::{phi1_phys, q_block, semigroup_phys, EigenBlock};

/// Coefficients of an element of `H_n`, one padded pair per block.
#[derive(Debug, Clone, PartialEq)]
pub struct GalerkinState {
    pub n: usize,
    pub t: f64,
    pub block_dim: usize,
    pub coords: Vec<Vec2>,
}

impl GalerkinState {
    pub fn zero(n: usize, block_dim: usize) -> Self {
        Self { n, t: 0.0, block_dim, coords: vec![Vec2::zeros(); n] }
    }

    /// `P_n x` for a datum given on any number of blocks.
    pub fn project(x: &[Vec2], n: usize, block_dim: usize) -> Self {
        let coords = (0..n)
            .map(|k| {
                let v = x.get(k).copied().unwrap_or_else(Vec2::zeros);
                if block_dim == 1 {
                    Vec2::new(v[0], 0.0)
                } else {
                    v
                }
            })
            .collect();
        Self { n, t: 0.0, block_dim, coords }
    }

    pub fn len(&self) -> usize {
        self.n * self.block_dim
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn flat(&self) -> Vec<f64> {
        self.coords.iter().flat_map(|v| v.iter().take(self.block_dim).copied().collect::<Vec<_>>()).collect()
    }

    pub fn norm_sq(&self) -> f64 {
        norm_sq(&self.coords)
    }
}

pub(crate) fn norm_sq(x: &[Vec2]) -> f64 {
    x.iter().map(|v| v.norm_squared()).sum()
}

/// Horizon, step count, trajectory count, seed and noise refinement.
///
/// The Brownian increments live on a grid `refine` times finer than the
/// time step, so runs with `steps` and `2·steps` share one noise path when
/// the product `steps · refine` is the same.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub t_end: f64,
    pub steps: usize,
    pub trajectories: usize,
    pub seed: u64,
    pub refine: usize,
}

impl RunConfig {
    pub fn new(t_end: f64, steps: usize, trajectories: usize, seed: u64) -> Self {
        Self { t_end, steps, trajectories, seed, refine: 1 }
    }

    pub fn with_refine(mut self, refine: usize) -> Self {
        self.refine = refine;
        self
    }

    pub fn h(&self) -> f64 {
        self.t_end / self.steps as f64
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.steps).map(|k| k as f64 * self.h()).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_end > 0.0) || self.steps == 0 || self.trajectories == 0 || self.refine == 0 {
            return Err(Error::InvalidParameter(format!("run needs T > 0 and positive steps, trajectories, refine; got {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
struct BlockOps {
    s: Mat2,
    /// `Φ₁(h) L̃ G̃`: response to a unit forcing.
    drift: Vec2,
    s_fine: Mat2,
    c_fine: Vec2,
    l_fine: Mat2,
}

/// Per-block step operators for one `(model, n, h, refine)`.
#[derive(Debug, Clone)]
pub struct Scheme {
    pub blocks: Vec<EigenBlock>,
    pub h: f64,
    pub steps: usize,
    pub refine: usize,
    pub block_dim: usize,
    ops: Vec<BlockOps>,
}

/// Brownian increments and OU increments of one trajectory,
/// indexed `[block · steps + step]`.
#[derive(Debug, Clone)]
pub struct StepNoise {
    pub steps: usize,
    pub dw: Vec<f64>,
    pub xi: Vec<Vec2>,
}

impl StepNoise {
    pub fn xi_at(&self, block: usize, step: usize) -> Vec2 {
        self.xi[block * self.steps + step]
    }

    pub fn dw_at(&self, block: usize, step: usize) -> f64 {
        self.dw[block * self.steps + step]
    }
}

fn sine_modes(model: &SpectralModel) -> bool {
    matches!(model.law, EigenLaw::DirichletLattice { m: 1, .. })
}

impl Scheme {
    pub fn new(model: &SpectralModel, n: usize, run: &RunConfig) -> Result<Self> {
        run.validate()?;
        let blocks = model.blocks_upto(n)?;
        let h = run.h();
        let hf = h / run.refine as f64;
        let ops = blocks
            .iter()
            .map(|b| -> Result<BlockOps> {
                let phi = phi1_phys(b, h);
                let phi_f = phi1_phys(b, hf);
                let c_fine = phi_f * b.noise;
                let q = q_block(b, hf, 1e-12)?;
                let cond = symmetrize(&(q - c_fine * c_fine.transpose() / hf));
                Ok(BlockOps { s: semigroup_phys(b, h), drift: phi * b.ltilde * b.noise_dir, s_fine: semigroup_phys(b, hf), c_fine, l_fine: psd_factor(&cond) })
            })
            .collect::<Result<Vec<_>>>()?;
        let block_dim = if model.is_damped() { 2 } else { 1 };
        Ok(Self { blocks, h, steps: run.steps, refine: run.refine, block_dim, ops })
    }

    pub fn n(&self) -> usize {
        self.blocks.len()
    }

    pub fn check_drift(&self, model: &SpectralModel, drift: &DriftSpec) -> Result<()> {
        drift.supports(&self.blocks, sine_modes(model))
    }

    /// Increments of trajectory `trajectory` for every block and step.
    pub fn trajectory_noise(&self, noise: &NoiseStream, trajectory: u64) -> StepNoise {
        let (steps, r) = (self.steps, self.refine);
        let hf = self.h / r as f64;
        let sq = hf.sqrt();
        let mut dw = vec![0.0; self.n() * steps];
        let mut xi = vec![Vec2::zeros(); self.n() * steps];
        for (i, (b, op)) in self.blocks.iter().zip(&self.ops).enumerate() {
            let mut cur = noise.cursor(trajectory, b.index as u64, 0);
            for k in 0..steps {
                let (mut w, mut eta) = (0.0, Vec2::zeros());
                for _ in 0..r {
                    let z = cur.next_step();
                    let dwj = sq * z[0];
                    let xij = op.c_fine * (dwj / hf) + op.l_fine * Vec2::new(z[1], z[2]);
                    eta = op.s_fine * eta + xij;
                    w += dwj;
                }
                if b.dim == 1 {
                    eta[1] = 0.0;
                }
                dw[i * steps + k] = w;
                xi[i * steps + k] = eta;
            }
        }
        StepNoise { steps, dw, xi }
    }

    /// `X_{k+1} = e^{hA}X_k + Φ₁(h)L̃B(X_k) + ξ_k` written into `out`.
    pub fn step_into(&self, drift: &DriftSpec, x: &[Vec2], noise: &StepNoise, k: usize, forcing: &mut [f64], out: &mut [Vec2]) -> Result<()> {
        drift.forcing(&self.blocks, x, forcing);
        for i in 0..self.n() {
            let op = &self.ops[i];
            let v = op.s * x[i] + op.drift * forcing[i] + noise.xi_at(i, k);
            if !(v[0].is_finite() && v[1].is_finite()) {
                return Err(Error::NonFiniteState { step: k + 1 });
            }
            out[i] = v;
        }
        Ok(())
    }

    /// One exponential Euler step with explicit per-block OU increments.
    pub fn exponential_euler_step(&self, drift: &DriftSpec, state: &GalerkinState, noise_slice: &[Vec2]) -> Result<GalerkinState> {
        let n = self.n();
        let mut forcing = vec![0.0; n];
        drift.forcing(&self.blocks, &state.coords, &mut forcing);
        let mut coords = Vec::with_capacity(n);
        for (i, ((op, x), f)) in self.ops.iter().zip(&state.coords).zip(&forcing).enumerate() {
            let v = op.s * x + op.drift * *f + noise_slice.get(i).copied().unwrap_or_else(Vec2::zeros);
            if !(v[0].is_finite() && v[1].is_finite()) {
                return Err(Error::NonFiniteState { step: 1 });
            }
            coords.push(v);
        }
        Ok(GalerkinState { n, t: state.t + self.h, block_dim: self.block_dim, coords })
    }

    /// Runs one path from `x0`, calling `visit(k, X_k)` for `k = 0..=steps`.
    pub fn run_path(&self, drift: &DriftSpec, x0: &[Vec2], noise: &StepNoise, mut visit: impl FnMut(usize, &[Vec2])) -> Result<()> {
        let n = self.n();
        let mut x = GalerkinState::project(x0, n, self.block_dim).coords;
        let mut y = vec![Vec2::zeros(); n];
        let mut f = vec![0.0; n];
        visit(0, &x);
        for k in 0..self.steps {
            self.step_into(drift, &x, noise, k, &mut f, &mut y)?;
            std::mem::swap(&mut x, &mut y);
            visit(k + 1, &x);
        }
        Ok(())
    }
}

/// One path of `W_{A,n}` on the grid of `run`, started at zero.
pub fn sample_convolution(model: &SpectralModel, noise: &NoiseStream, trajectory: u64, run: &RunConfig) -> Result<Vec<GalerkinState>> {
    let scheme = Scheme::new(model, model.n_max, run)?;
    let nz = scheme.trajectory_noise(noise, trajectory);
    let mut out = Vec::with_capacity(run.steps + 1);
    scheme.run_path(&DriftSpec::zero(), &[], &nz, |k, x| {
        out.push(GalerkinState { n: scheme.n(), t: k as f64 * scheme.h, block_dim: scheme.block_dim, coords: x.to_vec() })
    })?;
    Ok(out)
}

/// Whether `𝒱` is Hilbert–Schmidt, judged from the eigenvalue law.
pub fn v_hilbert_schmidt(model: &SpectralModel) -> bool {
    if model.noise_amp == 0.0 {
        return true;
    }
    let (_, delta) = model.law.tail_law();
    let (_, gamma) = model.weights();
    // Σ μ_n^{-2γ} for damped families, Σ λ_k^{-γ} for heat
    let p = if model.is_damped() { 2.0 * gamma * delta } else { gamma * delta };
    p > 1.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::Profile;

    #[test]
    fn linear_noiseless_path_is_the_semigroup() {
        let model = SpectralModel::damped_wave(0.4, 1.0, 0.1, 0.15, 0.9, 6).with_noise_amp(0.0);
        let run = RunConfig::new(1.0, 64, 1, 0);
        let scheme = Scheme::new(&model, 6, &run).unwrap();
        let x0: Vec<Vec2> = (0..6).map(|k| Vec2::new(1.0 / (k + 1) as f64, 0.5)).collect();
        let nz = scheme.trajectory_noise(&NoiseStream::new(0), 0);
        let mut last = Vec::new();
        scheme.run_path(&DriftSpec::zero(), &x0, &nz, |_, x| last = x.to_vec()).unwrap();
        for (b, (x, x0)) in scheme.blocks.iter().zip(last.iter().zip(&x0)) {
            let want = semigroup_phys(b, 1.0) * x0;
            assert!((x - want).norm() <= 1e-12 * want.norm().max(1e-300));
        }
    }

    #[test]
    fn constant_drift_fixed_point() {
        let model = SpectralModel::heat(1, 1.0, 0.0, 0.5, 0.9, 1).with_noise_amp(0.0);
        let run = RunConfig::new(40.0, 400, 1, 0);
        let scheme = Scheme::new(&model, 1, &run).unwrap();
        let drift = DriftSpec::mode_coefficients(3.0, 0.0, Profile::Constant, 1.0);
        let nz = scheme.trajectory_noise(&NoiseStream::new(0), 0);
        let mut last = 0.0;
        scheme.run_path(&drift, &[Vec2::new(5.0, 0.0)], &nz, |_, x| last = x[0][0]).unwrap();
        // −L̃b/λ with λ = −1, L̃ = 1
        assert!((last - 3.0).abs() < 1e-12);
    }

    #[test]
    fn nested_noise_sums() {
        let model = SpectralModel::heat(1, 1.0, 0.0, 0.0, 0.9, 3);
        let fine = Scheme::new(&model, 3, &RunConfig::new(1.0, 8, 1, 0).with_refine(2)).unwrap();
        let coarse = Scheme::new(&model, 3, &RunConfig::new(1.0, 4, 1, 0).with_refine(4)).unwrap();
        let ns = NoiseStream::new(9);
        let (a, b) = (fine.trajectory_noise(&ns, 5), coarse.trajectory_noise(&ns, 5));
        for blk in 0..3 {
            for k in 0..4 {
                let sum = a.dw_at(blk, 2 * k) + a.dw_at(blk, 2 * k + 1);
                assert!((sum - b.dw_at(blk, k)).abs() < 1e-14);
                let s = semigroup_phys(&fine.blocks[blk], 0.125);
                let comb = s * a.xi_at(blk, 2 * k) + a.xi_at(blk, 2 * k + 1);
                assert!((comb - b.xi_at(blk, k)).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn hilbert_schmidt_flags() {
        assert!(!v_hilbert_schmidt(&SpectralModel::damped_wave(0.4, 1.0, 0.1, 0.15, 0.9, 8)));
        assert!(v_hilbert_schmidt(&SpectralModel::beam(1, 0.4, 1.0, 0.15, 0.2, 0.95, 8)));
        assert!(!v_hilbert_schmidt(&SpectralModel::heat(1, 1.0, 0.0, 0.1, 0.9, 8)));
    }
}
