use crate::dst::SineTransform;
use crate::engine::{NoiseStream, RunConfig, Scheme};
use crate::error::{Error, Result};
use crate::linalg::Vec2;
use crate::models::{DriftSpec, EigenLaw, Family, SpectralModel};

#[derive(Debug, Clone, PartialEq)]
pub struct FdRow {
    pub intervals: usize,
    pub steps: usize,
    /// `sup_t ‖u_fd(t) − u_spectral(t)‖_{L²}` on the grid.
    pub discrepancy: f64,
    /// `sup_t ‖u_spectral(t)‖_{L²}`.
    pub reference_norm: f64,
}

/// Solves `(I − hΔ_h)u_{k+1} = u_k + h·L̃B(u_k) + ΔW_k` with the
/// three-point Laplacian, for the classical heat equation on `(0, π)`.
fn thomas(diag: f64, off: f64, rhs: &mut [f64]) {
    let n = rhs.len();
    let mut c = vec![0.0; n];
    let mut b = diag;
    c[0] = off / b;
    rhs[0] /= b;
    for i in 1..n {
        b = diag - off * c[i - 1];
        c[i] = off / b;
        rhs[i] = (rhs[i] - off * rhs[i - 1]) / b;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= c[i] * rhs[i + 1];
    }
}

/// Compares the spectral solution of a one-dimensional heat model with a
/// finite-difference solution driven by the same Brownian increments
/// projected onto the grid. `fd_seed` different from `seed` gives the
/// mismatched-noise control.
pub fn heat_fd_oracle(
    model: &SpectralModel,
    drift: &DriftSpec,
    x0: &[Vec2],
    t_end: f64,
    sizes: &[(usize, usize)],
    seed: u64,
    fd_seed: u64,
) -> Result<Vec<FdRow>> {
    if model.family != Family::Heat || !matches!(model.law, EigenLaw::DirichletLattice { m: 1, .. }) {
        return Err(Error::UnsupportedFamily("the finite-difference oracle covers the heat equation on (0, π)".into()));
    }
    if model.alpha != 1.0 || model.sigma != 0.0 {
        return Err(Error::InvalidParameter("the finite-difference oracle needs beta = 1 and sigma = 0".into()));
    }
    let n = model.n_max;
    sizes
        .iter()
        .map(|&(intervals, steps)| {
            if intervals <= n + 1 {
                return Err(Error::InvalidParameter(format!("{intervals} intervals cannot carry {n} modes")));
            }
            let run = RunConfig::new(t_end, steps, 1, seed);
            let scheme = Scheme::new(model, n, &run)?;
            scheme.check_drift(model, drift)?;
            let nz = scheme.trajectory_noise(&NoiseStream::new(seed), 0);
            let nz_fd = scheme.trajectory_noise(&NoiseStream::new(fd_seed), 0);
            let st = SineTransform::new(intervals);
            let dx = std::f64::consts::PI / intervals as f64;
            let l2 = |v: &[f64]| (dx * v.iter().map(|a| a * a).sum::<f64>()).sqrt();

            let mut spectral = Vec::with_capacity(steps + 1);
            scheme.run_path(drift, x0, &nz, |_, x| spectral.push(st.synthesize(&x.iter().map(|v| v[0]).collect::<Vec<_>>())))?;

            let h = scheme.h;
            let blocks = &scheme.blocks;
            let coeffs0: Vec<f64> = (0..n).map(|i| x0.get(i).map_or(0.0, |v| v[0])).collect();
            let mut u = st.synthesize(&coeffs0);
            let r = h / (dx * dx);
            let (mut discrepancy, mut reference_norm) = (l2(&u.iter().zip(&spectral[0]).map(|(a, b)| a - b).collect::<Vec<_>>()), l2(&spectral[0]));
            for k in 0..steps {
                let modal: Vec<Vec2> = st.analyze(&u, n).into_iter().map(|c| Vec2::new(c, 0.0)).collect();
                let f = drift.forcing_vec(blocks, &modal);
                let push: Vec<f64> = blocks.iter().enumerate().map(|(i, b)| h * b.ltilde[(0, 0)] * f[i] + b.noise[0] * nz_fd.dw_at(i, k)).collect();
                let push = st.synthesize(&push);
                u.iter_mut().zip(&push).for_each(|(a, p)| *a += p);
                thomas(1.0 + 2.0 * r, -r, &mut u);
                let diff: Vec<f64> = u.iter().zip(&spectral[k + 1]).map(|(a, b)| a - b).collect();
                discrepancy = discrepancy.max(l2(&diff));
                reference_norm = reference_norm.max(l2(&spectral[k + 1]));
            }
            Ok(FdRow { intervals, steps, discrepancy, reference_norm })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::Profile;

    #[test]
    fn thomas_solves_tridiagonal() {
        let mut b = vec![1.0, 2.0, 3.0, 4.0];
        let x = b.clone();
        // apply the matrix to x, then solve back
        for (i, v) in b.iter_mut().enumerate() {
            *v = 3.0 * x[i] - if i > 0 { x[i - 1] } else { 0.0 } - if i < 3 { x[i + 1] } else { 0.0 };
        }
        thomas(3.0, -1.0, &mut b);
        for (a, c) in b.iter().zip(&x) {
            assert!((a - c).abs() < 1e-14);
        }
    }

    #[test]
    fn refinement_closes_the_gap_and_wrong_noise_does_not() {
        let model = SpectralModel::heat(1, 1.0, 0.5, 0.0, 0.9, 8);
        let drift = DriftSpec::mode_coefficients(1.0, 1.0, Profile::Tanh, 1.0);
        let x0: Vec<Vec2> = (1..=8).map(|k| Vec2::new(1.0 / k as f64, 0.0)).collect();
        let sizes = [(32, 100), (64, 400), (128, 1600)];
        let rows = heat_fd_oracle(&model, &drift, &x0, 0.5, &sizes, 3, 3).unwrap();
        assert!(rows.windows(2).all(|w| w[1].discrepancy < w[0].discrepancy), "{rows:?}");
        assert!(rows[2].discrepancy < 0.02 * rows[2].reference_norm, "{rows:?}");
        let bad = heat_fd_oracle(&model, &drift, &x0, 0.5, &sizes[2..], 3, 4).unwrap();
        assert!(bad[0].discrepancy > 10.0 * rows[2].discrepancy);
    }
}
