//! Executable versions of the integrability and summability hypotheses.

use rayon::prelude::*;

use super::{DriftSpec, Family, SpectralModel};
use crate::error::{Error, Result};
use crate::fit::{fit_exponent, ExponentFit};
use crate::linalg::spectral_norm;
use crate::quad;
use crate::spectral::{gamma_block, semigroup_phys, BlockOperator, EigenBlock, OperatorKind};

/// `Q_t` on `H_{n_max}`, block by block.
pub fn q_t(model: &SpectralModel, t: f64, n_max: usize) -> Result<BlockOperator> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("Q_t needs t > 0, got {t}")));
    }
    let blocks = model.blocks_upto(n_max)?;
    BlockOperator::build(&blocks, OperatorKind::Qt(t))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub eta: f64,
    /// `Σ_{n ≤ N} ∫₀^t s^{-η} ‖e^{sA}G e_n‖² ds` at `N = n_max`.
    pub partial: f64,
    /// Integral-comparison tail from the power law fitted on the last octave.
    pub tail: f64,
    pub total: f64,
    /// Same total with `2·n_max` modes.
    pub total_doubled: f64,
    /// Decay exponent `p` of the per-mode integrals, `I_n ≈ C n^{-p}`.
    pub decay: f64,
    pub stable: bool,
    pub passes: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceReport {
    pub t: f64,
    pub n_max: usize,
    pub rows: Vec<TraceRow>,
    /// Largest `η` of the grid that passes.
    pub best_eta: Option<f64>,
}

fn mode_trace_integral(block: &EigenBlock, eta: f64, t: f64) -> Result<f64> {
    let g = block.noise;
    if g.norm() == 0.0 {
        return Ok(0.0);
    }
    let k = 1.0 / (1.0 - eta);
    let f = |s: f64| {
        let x = semigroup_phys(block, s) * g;
        if block.dim == 1 {
            x[0] * x[0]
        } else {
            x.norm_squared()
        }
    };
    // s = u^{1/(1-η)} absorbs the s^{-η} singularity
    let v = quad::adaptive_scalar(|u| f(u.powf(k)), 0.0, t.powf(1.0 - eta), 1e-9, 20_000)?;
    Ok(k * v)
}

/// Per-mode power-law decay fitted on `n ∈ [N/2, N]` and the matching tail.
fn power_tail(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if values[n - 1] == 0.0 {
        return (f64::INFINITY, 0.0);
    }
    let lo = (n / 2).max(1);
    let pts: Vec<(f64, f64)> = (lo..=n).rev().map(|k| (k as f64, values[k - 1])).collect();
    let p = match fit_exponent(&pts) {
        Ok(f) => -f.slope,
        Err(_) => return (f64::NAN, f64::INFINITY),
    };
    // A fitted exponent within fit precision of one is the harmonic series.
    if !(p > 1.0 + 1e-6) {
        return (p, f64::INFINITY);
    }
    let nn = n as f64;
    let tail = values[n - 1] * nn.powf(p) * (nn + 0.5).powf(1.0 - p) / (p - 1.0);
    (p, tail)
}

/// Checks `∫₀^t s^{-η} Tr[e^{sA}GG*e^{sA*}] ds < ∞` for each `η` of the grid.
/// A row passes when the per-mode decay exponent exceeds one and the total
/// moves by less than 1% when the number of modes doubles.
pub fn trace_integrability(model: &SpectralModel, eta_grid: &[f64], t: f64) -> Result<TraceReport> {
    if eta_grid.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
        return Err(Error::InvalidParameter("eta grid must lie in (0, 1)".into()));
    }
    let n = model.n_max;
    let blocks = model.blocks_upto(2 * n)?;
    let mut rows = Vec::with_capacity(eta_grid.len());
    for &eta in eta_grid {
        let vals = blocks.par_iter().map(|b| mode_trace_integral(b, eta, t)).collect::<Result<Vec<f64>>>()?;
        let partial = quad::compensated_sum(vals[..n].iter().copied());
        let partial2 = quad::compensated_sum(vals.iter().copied());
        let (decay, tail) = power_tail(&vals[..n]);
        let (_, tail2) = power_tail(&vals);
        let (total, total_doubled) = (partial + tail, partial2 + tail2);
        let zero = partial2 == 0.0;
        let stable = zero || (total.is_finite() && total_doubled.is_finite() && (total - total_doubled).abs() < 0.01 * total_doubled);
        let passes = zero || (decay > 1.0 + 1e-6 && stable);
        rows.push(TraceRow { eta, partial, tail, total, total_doubled, decay, stable, passes });
    }
    let best_eta = rows.iter().filter(|r| r.passes).map(|r| r.eta).fold(None, |b: Option<f64>, e| Some(b.map_or(e, |x| x.max(e))));
    Ok(TraceReport { t, n_max: n, rows, best_eta })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GammaReport {
    pub s_grid: Vec<f64>,
    /// `‖Γ_s‖` on `H_{n_max}`.
    pub gamma_norm: Vec<f64>,
    /// `‖Γ_s G̃‖` on `H_{n_max}`.
    pub gamma_g_norm: Vec<f64>,
    pub fit_gamma: ExponentFit,
    pub fit_gamma_g: ExponentFit,
    /// Exponent of `s ↦ ‖Γ_s‖^{1-θ}‖Γ_s G̃‖` near zero.
    pub super_exponent: f64,
    /// `∫₀^t ‖Γ_s‖^{1-θ}‖Γ_s G̃‖ ds` (grid part plus power-law tail).
    pub super_integral: f64,
    pub super_finite: bool,
    /// Exponent of `s ↦ ‖Γ_s‖^{1-θ'}` near zero.
    pub theta_prime_exponent: f64,
    pub theta_prime_finite: bool,
    pub max_condition: f64,
}

/// Evaluates `Γ_s = Q_s^{-1/2} e^{sA}` on `s = t·2^{-j}`, `j = 0..=levels`,
/// fits the blow-up exponents on the finer half of the grid, and reports
/// whether the integrals in the controllability hypothesis are finite.
pub fn gamma_integrability(model: &SpectralModel, t: f64, theta: f64, theta_prime: f64, levels: usize) -> Result<GammaReport> {
    if !(0.0 < theta_prime && theta_prime < theta && theta < 1.0) || !(t > 0.0) || levels < 7 {
        return Err(Error::InvalidParameter("need t > 0, 0 < θ' < θ < 1 and at least 8 grid levels".into()));
    }
    let blocks = model.blocks()?;
    let s_grid: Vec<f64> = (0..=levels).map(|j| t * 2f64.powi(-(j as i32))).collect();
    let mut gamma_norm = Vec::new();
    let mut gamma_g_norm = Vec::new();
    let mut max_condition = 0.0f64;
    for &s in &s_grid {
        let per_block = blocks
            .par_iter()
            .map(|b| {
                let (gm, cond) = gamma_block(b, s)?;
                let gg = gm * b.noise_dir;
                Ok((spectral_norm(&gm), if b.dim == 1 { gg[0].abs() } else { gg.norm() }, cond))
            })
            .collect::<Result<Vec<_>>>()?;
        let (mut a, mut g) = (0.0f64, 0.0f64);
        for (x, y, c) in per_block {
            a = a.max(x);
            g = g.max(y);
            max_condition = max_condition.max(c);
        }
        gamma_norm.push(a);
        gamma_g_norm.push(g);
    }
    let half = levels / 2;
    let tail_fit = |v: &[f64]| fit_exponent(&s_grid[half..].iter().zip(&v[half..]).map(|(&s, &x)| (s, x)).collect::<Vec<_>>());
    let fit_gamma = tail_fit(&gamma_norm)?;
    let fit_gamma_g = tail_fit(&gamma_g_norm)?;
    let super_vals: Vec<f64> = gamma_norm.iter().zip(&gamma_g_norm).map(|(a, g)| a.powf(1.0 - theta) * g).collect();
    let super_exponent = (1.0 - theta) * fit_gamma.slope + fit_gamma_g.slope;
    let super_finite = super_exponent > -1.0;
    // trapezoid in ln s on the grid, power-law tail below the finest point
    let mut integral = 0.0;
    for j in 0..levels {
        let (s0, s1) = (s_grid[j], s_grid[j + 1]);
        integral += 0.5 * (s0 * super_vals[j] + s1 * super_vals[j + 1]) * (s0 / s1).ln();
    }
    let finest = s_grid[levels] * super_vals[levels];
    integral += if super_finite { finest / (super_exponent + 1.0) } else { f64::INFINITY };
    let theta_prime_exponent = (1.0 - theta_prime) * fit_gamma.slope;
    Ok(GammaReport {
        s_grid,
        gamma_norm,
        gamma_g_norm,
        fit_gamma,
        fit_gamma_g,
        super_exponent,
        super_integral: integral,
        super_finite,
        theta_prime_exponent,
        theta_prime_finite: theta_prime_exponent > -1.0,
        max_condition,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesReport {
    pub partial_sum: f64,
    pub tail_bound: f64,
    /// Decay exponent `p` of the terms, `term_n ≈ C n^{-p}`.
    pub exponent: f64,
    pub converges: bool,
}

/// `−Σ_n ζ_n² Σ_j ‖B^n_j‖² / Re ρ^n_j` with `B^n_j = ⟨B(·), Ψ^n_j⟩`.
/// The exponent test uses the asymptotic law of the eigenvalues together
/// with the drift's declared decay of its mode norms.
pub fn series_condition(model: &SpectralModel, drift: &DriftSpec, n_max: usize) -> Result<SeriesReport> {
    let blocks = model.blocks_upto(n_max)?;
    let (_, delta) = model.law.tail_law();
    let (sigma, _) = model.weights();
    let q = drift.mode_norm_decay();
    let p = match model.family {
        Family::Heat => (2.0 * sigma + model.alpha) * delta + 2.0 * q,
        _ => (model.alpha + 2.0 * sigma) * delta + 2.0 * q,
    };
    if drift.is_zero() {
        return Ok(SeriesReport { partial_sum: 0.0, tail_bound: 0.0, exponent: p, converges: true });
    }
    let terms: Vec<f64> = blocks
        .iter()
        .map(|b| {
            let norm = drift.mode_holder_norm(b);
            let lams: Vec<_> = if b.dim == 1 { vec![b.lambda_plus] } else { vec![b.lambda_plus, b.lambda_minus] };
            let inner: f64 = lams
                .iter()
                .map(|l| {
                    let weight = if b.dim == 1 { 1.0 } else { l.norm_sqr() / (b.mu + l.norm_sqr()) };
                    -(weight * norm * norm) / l.re
                })
                .sum();
            b.zeta * b.zeta * inner
        })
        .collect();
    let partial_sum = quad::compensated_sum(terms.iter().copied());
    let bounded = drift.sup_norm().is_finite();
    let nn = n_max as f64;
    let tail_bound = if p > 1.0 && bounded { terms[n_max - 1] * nn.powf(p) * (nn + 0.5).powf(1.0 - p) / (p - 1.0) } else { f64::INFINITY };
    Ok(SeriesReport { partial_sum, tail_bound, exponent: p, converges: p > 1.0 && bounded })
}
