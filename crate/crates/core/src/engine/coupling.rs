use rayon::prelude::*;

use super::ensemble::mean_se;
use super::{norm_sq, v_hilbert_schmidt, GalerkinState, NoiseStream, RunConfig, Scheme};
use crate::error::{Error, Result};
use crate::linalg::Vec2;
use crate::models::{DriftSpec, SpectralModel};

/// Common-noise comparison of the solutions started at `x₁` and `x₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingDiagnostics {
    pub times: Vec<f64>,
    /// `Δ(t_k) = E‖X₁ − X₂‖²` with standard errors.
    pub delta: Vec<(f64, f64)>,
    /// `‖P_n(x₁ − x₂)‖²`.
    pub initial_gap: f64,
    pub sup_delta: f64,
    /// `sup_t Δ(t) / ‖P_n(x₁ − x₂)‖²`.
    pub lipschitz_ratio: f64,
    /// `E sup_t ‖X₁ − X₂‖²` with its standard error, reported when `𝒱` is
    /// Hilbert–Schmidt.
    pub sup_inside: Option<(f64, f64)>,
    pub sup_inside_ratio: Option<f64>,
}

pub fn couple_and_measure(model: &SpectralModel, drift: &DriftSpec, x1: &[Vec2], x2: &[Vec2], run: &RunConfig) -> Result<CouplingDiagnostics> {
    let scheme = Scheme::new(model, model.n_max, run)?;
    scheme.check_drift(model, drift)?;
    let noise = NoiseStream::new(run.seed);
    let (n, steps) = (scheme.n(), run.steps);
    let p1 = GalerkinState::project(x1, n, scheme.block_dim).coords;
    let p2 = GalerkinState::project(x2, n, scheme.block_dim).coords;
    let initial_gap = p1.iter().zip(&p2).map(|(a, b)| (a - b).norm_squared()).sum::<f64>();
    let per_traj = (0..run.trajectories as u64)
        .into_par_iter()
        .map(|j| {
            let nz = scheme.trajectory_noise(&noise, j);
            let mut a = vec![Vec::new(); steps + 1];
            scheme.run_path(drift, &p1, &nz, |k, x| a[k] = x.to_vec())?;
            let mut d = vec![0.0; steps + 1];
            scheme.run_path(drift, &p2, &nz, |k, x| d[k] = a[k].iter().zip(x).map(|(u, v)| (u - v).norm_squared()).sum())?;
            Ok(d)
        })
        .collect::<Result<Vec<_>>>()?;
    let delta: Vec<(f64, f64)> = (0..=steps).map(|k| mean_se(per_traj.iter().map(|d| d[k]))).collect();
    let sup_delta = delta.iter().map(|d| d.0).fold(0.0, f64::max);
    let ratio = |v: f64| if initial_gap == 0.0 { 0.0 } else { v / initial_gap };
    let sup_inside = v_hilbert_schmidt(model).then(|| mean_se(per_traj.iter().map(|d| d.iter().copied().fold(0.0, f64::max))));
    Ok(CouplingDiagnostics {
        times: run.times(),
        delta,
        initial_gap,
        sup_delta,
        lipschitz_ratio: ratio(sup_delta),
        sup_inside_ratio: sup_inside.map(|s| ratio(s.0)),
        sup_inside,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    /// `sup_t E‖X_n − X_ref‖²` and the standard error at the maximizing time.
    pub sup_mean_sq: (f64, f64),
    /// `E sup_t ‖X_n − X_ref‖²` when `𝒱` is Hilbert–Schmidt.
    pub mean_sup_sq: Option<(f64, f64)>,
    /// `sup_t E‖X_n − X_ref‖^{2θ}` with the drift's declared `θ`.
    pub holder_moment: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub n_ref: usize,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    /// Successive ratios of `sup_t E‖X_n − X_ref‖²`.
    pub fn ratios(&self) -> Vec<f64> {
        self.rows.windows(2).map(|w| w[1].sup_mean_sq.0 / w[0].sup_mean_sq.0).collect()
    }
}

/// Compares truncations `n ∈ n_list` against `n_ref` under common noise.
pub fn galerkin_convergence(
    model: &SpectralModel,
    drift: &DriftSpec,
    x0: &[Vec2],
    run: &RunConfig,
    n_list: &[usize],
    n_ref: usize,
) -> Result<ConvergenceTable> {
    if n_list.iter().any(|&n| n == 0 || n > n_ref) {
        return Err(Error::InvalidParameter(format!("truncations {n_list:?} must lie in 1..={n_ref}")));
    }
    let reference = Scheme::new(model, n_ref, run)?;
    reference.check_drift(model, drift)?;
    let schemes = n_list.iter().map(|&n| Scheme::new(model, n, run)).collect::<Result<Vec<_>>>()?;
    let noise = NoiseStream::new(run.seed);
    let steps = run.steps;
    let theta = drift.theta;
    // per trajectory: for each n, errors at every grid time
    let per_traj = (0..run.trajectories as u64)
        .into_par_iter()
        .map(|j| {
            let nz = reference.trajectory_noise(&noise, j);
            let mut xref = vec![Vec::new(); steps + 1];
            reference.run_path(drift, x0, &nz, |k, x| xref[k] = x.to_vec())?;
            schemes
                .iter()
                .map(|s| {
                    let mut e = vec![0.0; steps + 1];
                    let n = s.n();
                    s.run_path(drift, x0, &nz, |k, x| {
                        let head: f64 = x.iter().zip(&xref[k]).map(|(a, b)| (a - b).norm_squared()).sum();
                        e[k] = head + norm_sq(&xref[k][n..]);
                    })?;
                    Ok(e)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let hs = v_hilbert_schmidt(model);
    let rows = n_list
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let per_time: Vec<(f64, f64)> = (0..=steps).map(|k| mean_se(per_traj.iter().map(|t| t[i][k]))).collect();
            let sup_mean_sq = per_time.iter().copied().fold((0.0, 0.0), |a, b| if b.0 > a.0 { b } else { a });
            let holder_moment = (0..=steps).map(|k| mean_se(per_traj.iter().map(|t| t[i][k].powf(theta))).0).fold(0.0, f64::max);
            let mean_sup_sq = hs.then(|| mean_se(per_traj.iter().map(|t| t[i].iter().copied().fold(0.0, f64::max))));
            ConvergenceRow { n, sup_mean_sq, mean_sup_sq, holder_moment }
        })
        .collect();
    Ok(ConvergenceTable { n_ref, rows })
}
