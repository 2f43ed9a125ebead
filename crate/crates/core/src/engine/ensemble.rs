use rayon::prelude::*;

use super::{GalerkinState, NoiseStream, RunConfig, Scheme};
use crate::error::Result;
use crate::linalg::{Mat2, Vec2};
use crate::models::{DriftSpec, SpectralModel};
use crate::quad::Neumaier;

/// Stored trajectories on a shared grid.
#[derive(Debug, Clone)]
pub struct PathEnsemble {
    pub family: &'static str,
    pub n: usize,
    pub times: Vec<f64>,
    pub seed: u64,
    pub scheme: &'static str,
    pub trajectories: Vec<Vec<GalerkinState>>,
}

impl PathEnsemble {
    /// `E‖X(t_k)‖²` per grid time with standard errors.
    pub fn mean_norm_sq(&self) -> Vec<(f64, f64)> {
        (0..self.times.len()).map(|k| mean_se(self.trajectories.iter().map(|tr| tr[k].norm_sq()))).collect()
    }

    /// Componentwise mean state per grid time.
    pub fn mean_path(&self) -> Vec<Vec<Vec2>> {
        let m = self.trajectories.len() as f64;
        (0..self.times.len())
            .map(|k| {
                (0..self.n)
                    .map(|i| {
                        let mut acc = [Neumaier::default(), Neumaier::default()];
                        for tr in &self.trajectories {
                            acc[0].add(tr[k].coords[i][0]);
                            acc[1].add(tr[k].coords[i][1]);
                        }
                        Vec2::new(acc[0].value() / m, acc[1].value() / m)
                    })
                    .collect()
            })
            .collect()
    }
}

/// Mean and standard error with compensated sums, in iteration order.
pub(crate) fn mean_se(xs: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut s1, mut s2, mut n) = (Neumaier::default(), Neumaier::default(), 0usize);
    for x in xs {
        s1.add(x);
        s2.add(x * x);
        n += 1;
    }
    let nf = n as f64;
    let mean = s1.value() / nf;
    let var = if n > 1 { ((s2.value() / nf - mean * mean) * nf / (nf - 1.0)).max(0.0) } else { 0.0 };
    (mean, (var / nf).sqrt())
}

/// Simulates `trajectories` independent paths. Output depends only on the
/// inputs and the seed, not on the number of worker threads.
pub fn simulate_ensemble(model: &SpectralModel, drift: &DriftSpec, x0: &[Vec2], run: &RunConfig) -> Result<PathEnsemble> {
    let scheme = Scheme::new(model, model.n_max, run)?;
    scheme.check_drift(model, drift)?;
    let noise = NoiseStream::new(run.seed);
    let trajectories = (0..run.trajectories as u64)
        .into_par_iter()
        .map(|j| {
            let nz = scheme.trajectory_noise(&noise, j);
            let mut path = Vec::with_capacity(run.steps + 1);
            scheme.run_path(drift, x0, &nz, |k, x| {
                path.push(GalerkinState { n: scheme.n(), t: k as f64 * scheme.h, block_dim: scheme.block_dim, coords: x.to_vec() })
            })?;
            Ok(path)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PathEnsemble { family: model.family.name(), n: scheme.n(), times: run.times(), seed: run.seed, scheme: "exponential-euler/exact-ou", trajectories })
}

/// Empirical second moments of one `(block, time)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentCell {
    pub block: usize,
    pub time: f64,
    /// `E[X Xᵀ]` on the block.
    pub second: Mat2,
    /// Standard errors of the entries of `second`.
    pub se: Mat2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    pub trajectories: usize,
    pub cells: Vec<MomentCell>,
}

/// Streams `trajectories` paths without storing them and accumulates
/// second moments per block and grid time (`t > 0`).
pub fn second_moments(model: &SpectralModel, drift: &DriftSpec, x0: &[Vec2], run: &RunConfig) -> Result<MomentTable> {
    let scheme = Scheme::new(model, model.n_max, run)?;
    scheme.check_drift(model, drift)?;
    let noise = NoiseStream::new(run.seed);
    let (n, steps) = (scheme.n(), run.steps);
    let cells = n * steps;
    // sums of x_a x_b and of their squares for ab ∈ {00, 01, 11}
    let mut acc = vec![[Neumaier::default(); 6]; cells];
    const CHUNK: u64 = 4096;
    let total = run.trajectories as u64;
    let mut start = 0;
    while start < total {
        let end = (start + CHUNK).min(total);
        let chunk = (start..end)
            .into_par_iter()
            .map(|j| {
                let nz = scheme.trajectory_noise(&noise, j);
                let mut rec = vec![Vec2::zeros(); cells];
                scheme.run_path(drift, x0, &nz, |k, x| {
                    if k > 0 {
                        for i in 0..n {
                            rec[i * steps + k - 1] = x[i];
                        }
                    }
                })?;
                Ok(rec)
            })
            .collect::<Result<Vec<_>>>()?;
        for rec in &chunk {
            for (c, x) in acc.iter_mut().zip(rec) {
                let p = [x[0] * x[0], x[0] * x[1], x[1] * x[1]];
                for e in 0..3 {
                    c[e].add(p[e]);
                    c[3 + e].add(p[e] * p[e]);
                }
            }
        }
        start = end;
    }
    let m = total as f64;
    let h = run.h();
    let cells = (0..n)
        .flat_map(|i| (0..steps).map(move |k| (i, k)))
        .map(|(i, k)| {
            let c = &acc[i * steps + k];
            let stat = |e: usize| {
                let mean = c[e].value() / m;
                let var = ((c[3 + e].value() / m - mean * mean) * m / (m - 1.0).max(1.0)).max(0.0);
                (mean, (var / m).sqrt())
            };
            let (a, b, d) = (stat(0), stat(1), stat(2));
            MomentCell { block: scheme.blocks[i].index, time: (k + 1) as f64 * h, second: Mat2::new(a.0, b.0, b.0, d.0), se: Mat2::new(a.1, b.1, b.1, d.1) }
        })
        .collect();
    Ok(MomentTable { trajectories: run.trajectories, cells })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::Profile;

    #[test]
    fn same_seed_same_paths_any_thread_count() {
        let model = SpectralModel::damped_wave(0.4, 1.0, 0.1, 0.15, 0.9, 5);
        let drift = DriftSpec::mode_coefficients(1.0, 0.0, Profile::HolderSign { theta: 0.9 }, 0.9);
        let run = RunConfig::new(0.5, 20, 16, 11);
        let x0 = vec![Vec2::new(0.3, -0.2); 5];
        let pool = |t| rayon::ThreadPoolBuilder::new().num_threads(t).build().unwrap();
        let a = pool(1).install(|| simulate_ensemble(&model, &drift, &x0, &run).unwrap());
        let b = pool(4).install(|| simulate_ensemble(&model, &drift, &x0, &run).unwrap());
        for (p, q) in a.trajectories.iter().zip(&b.trajectories) {
            for (s, t) in p.iter().zip(q) {
                assert_eq!(s.coords, t.coords);
            }
        }
    }

    #[test]
    fn zero_noise_zero_start_stays_zero() {
        let model = SpectralModel::heat(1, 1.0, 0.0, 0.0, 0.9, 4).with_noise_amp(0.0);
        let e = simulate_ensemble(&model, &DriftSpec::zero(), &[], &RunConfig::new(1.0, 10, 3, 2)).unwrap();
        assert!(e.trajectories.iter().flatten().all(|s| s.norm_sq() == 0.0));
    }
}
