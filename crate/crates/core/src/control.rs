//! Explicit null control of `Y′ = A_n Y + G_n u`, its energy and the
//! scaling of the energy as the horizon shrinks.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fit::{fit_exponent, ExponentFit};
use crate::linalg::{sym_max_eig, Mat2, Vec2};
use crate::models::SpectralModel;
use crate::quad;
use crate::spectral::{gamma_block, semigroup_phys, EigenBlock};

/// `Φ_t(τ) = C_m τ^m (t − τ)` with unit mass on `[0, t]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiProfile {
    pub t: f64,
    pub m: u32,
    pub c_m: f64,
}

impl PhiProfile {
    pub fn phi(&self, tau: f64) -> f64 {
        self.c_m * tau.powi(self.m as i32) * (self.t - tau)
    }

    pub fn dphi(&self, tau: f64) -> f64 {
        let m = self.m as i32;
        self.c_m * (m as f64 * tau.powi(m - 1) * (self.t - tau) - tau.powi(m))
    }
}

pub fn phi_profile(t: f64, m: u32) -> Result<PhiProfile> {
    if !(t > 0.0) || m == 0 {
        return Err(Error::InvalidParameter(format!("profile needs t > 0 and m >= 1, got t = {t}, m = {m}")));
    }
    let mf = m as f64;
    Ok(PhiProfile { t, m, c_m: (mf + 1.0) * (mf + 2.0) / t.powf(mf + 2.0) })
}

/// Smallest `m ≥ 1` with `2m − 2γ/α > −1`.
pub fn profile_order(alpha: f64, gamma: f64) -> u32 {
    let mut m = 1;
    while 2.0 * m as f64 - 2.0 * gamma / alpha <= -1.0 {
        m += 1;
    }
    m
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControlProblem {
    pub model: SpectralModel,
    pub t: f64,
    /// Initial datum on the first `h.len()` blocks.
    pub h: Vec<Vec2>,
    pub m: u32,
}

impl ControlProblem {
    /// Problem with the smallest admissible profile order.
    pub fn new(model: SpectralModel, t: f64, h: Vec<Vec2>) -> Result<Self> {
        let (_, gamma) = model.weights();
        let m = profile_order(model.alpha, gamma);
        let p = Self { model, t, h, m };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let (_, gamma) = self.model.weights();
        let a = self.model.alpha;
        if !self.model.is_damped() {
            return Err(Error::UnsupportedFamily(format!("control construction needs a damped family, got {}", self.model.family.name())));
        }
        if !(a > 0.0 && a <= 0.5) || gamma < 0.0 {
            return Err(Error::InvalidParameter(format!("control estimates need alpha in (0, 1/2] and gamma >= 0; got alpha = {a}, gamma = {gamma}")));
        }
        if !(2.0 * self.m as f64 - 2.0 * gamma / a > -1.0) {
            return Err(Error::InvalidParameter(format!("profile order m = {} violates 2m − 2γ/α > −1", self.m)));
        }
        if !(self.t > 0.0) || self.h.is_empty() {
            return Err(Error::InvalidParameter("need t > 0 and a nonempty datum".into()));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.h.len()
    }
}

/// Rows `K₁`, `K₂` of `[G | AG]^{-1}` on a damped block.
fn gains(b: &EigenBlock) -> Result<(Vec2, Vec2)> {
    let gap = (b.lambda_plus - b.lambda_minus).norm();
    if !(gap > 1e-12 * b.lambda_minus.norm()) {
        return Err(Error::IllConditionedK { index: b.index, gap });
    }
    let g = b.noise;
    let ag = b.generator * g;
    let k = Mat2::from_columns(&[g, ag]).try_inverse().ok_or(Error::IllConditionedK { index: b.index, gap })?;
    Ok((Vec2::new(k[(0, 0)], k[(0, 1)]), Vec2::new(k[(1, 0)], k[(1, 1)])))
}

/// Row `r(τ)` with `u(τ) = r(τ)·h` on one block.
fn control_row(b: &EigenBlock, k1: &Vec2, k2: &Vec2, p: &PhiProfile, tau: f64) -> Vec2 {
    let s = semigroup_phys(b, tau);
    let (phi, dphi) = (p.phi(tau), p.dphi(tau));
    let r = -(k1.transpose() * s) * phi - (k2.transpose() * s) * dphi - (k2.transpose() * b.generator * s) * phi;
    r.transpose()
}

/// `M = ∫₀^t r(τ)ᵀ r(τ) dτ` so that the energy on the block is `√(hᵀMh)`.
fn energy_matrix(b: &EigenBlock, p: &PhiProfile) -> Result<Mat2> {
    let (k1, k2) = gains(b)?;
    let v = quad::adaptive(
        |tau| {
            let r = control_row(b, &k1, &k2, p, tau);
            [r[0] * r[0], r[0] * r[1], r[1] * r[1]]
        },
        0.0,
        p.t,
        1e-10,
        20_000,
    )?;
    Ok(Mat2::new(v[0], v[1], v[1], v[2]))
}

/// The control `u = K₁ψ_t + K₂ψ_t′`, evaluable at any `τ`, with samples
/// and its `L²(0, t; U)` energy.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlSignal {
    pub profile: PhiProfile,
    pub blocks: Vec<EigenBlock>,
    pub h: Vec<Vec2>,
    gains: Vec<(Vec2, Vec2)>,
    pub sample_times: Vec<f64>,
    /// `u(τ)` per sample time, one component per mode.
    pub samples: Vec<Vec<f64>>,
    pub energy: f64,
}

impl ControlSignal {
    /// `u(τ)`; zero at both endpoints by definition.
    pub fn eval(&self, tau: f64) -> Vec<f64> {
        if tau <= 0.0 || tau >= self.profile.t {
            return vec![0.0; self.blocks.len()];
        }
        self.blocks.iter().zip(&self.gains).zip(&self.h).map(|((b, (k1, k2)), h)| control_row(b, k1, k2, &self.profile, tau).dot(h)).collect()
    }
}

pub fn build_control(problem: &ControlProblem) -> Result<ControlSignal> {
    build_control_sampled(problem, 65)
}

pub fn build_control_sampled(problem: &ControlProblem, samples: usize) -> Result<ControlSignal> {
    problem.validate()?;
    let profile = phi_profile(problem.t, problem.m)?;
    let blocks = problem.model.blocks_upto(problem.n())?;
    let gains = blocks.iter().map(gains).collect::<Result<Vec<_>>>()?;
    let parts = blocks
        .par_iter()
        .zip(&problem.h)
        .map(|(b, h)| {
            if h.norm() == 0.0 {
                return Ok(0.0);
            }
            let m = energy_matrix(b, &profile)?;
            Ok(h.dot(&(m * h)).max(0.0))
        })
        .collect::<Result<Vec<f64>>>()?;
    let energy = quad::compensated_sum(parts).sqrt();
    let mut sig = ControlSignal { profile, blocks, h: problem.h.clone(), gains, sample_times: Vec::new(), samples: Vec::new(), energy };
    let k = samples.max(2);
    sig.sample_times = (0..k).map(|i| problem.t * i as f64 / (k - 1) as f64).collect();
    sig.samples = sig.sample_times.iter().map(|&tau| sig.eval(tau)).collect();
    Ok(sig)
}

/// `Y(t)` for `Y′ = AY + Gu`, `Y(0) = h`: exact block semigroup per step
/// and 20-point Gauss–Legendre for the forcing on each step.
pub fn integrate_controlled(problem: &ControlProblem, u: impl Fn(f64) -> Vec<f64>, steps: usize) -> Result<Vec<Vec2>> {
    problem.validate()?;
    if steps == 0 {
        return Err(Error::InvalidParameter("steps must be positive".into()));
    }
    let blocks = problem.model.blocks_upto(problem.n())?;
    let dt = problem.t / steps as f64;
    let rule = quad::legendre(20);
    let step_s: Vec<Mat2> = blocks.iter().map(|b| semigroup_phys(b, dt)).collect();
    // e^{(dt − s)A} at the nodes of one step
    let node_s: Vec<Vec<(f64, f64, Mat2)>> = blocks
        .iter()
        .map(|b| {
            rule.iter()
                .map(|&(x, w)| {
                    let s = 0.5 * dt * (x + 1.0);
                    (s, 0.5 * dt * w, semigroup_phys(b, dt - s))
                })
                .collect()
        })
        .collect();
    let mut y = problem.h.clone();
    for k in 0..steps {
        let t0 = k as f64 * dt;
        let mut forcing = vec![Vec2::zeros(); y.len()];
        for (j, &(s, _, _)) in node_s[0].iter().enumerate() {
            let uv = u(t0 + s);
            for i in 0..y.len() {
                let (_, w, ref e) = node_s[i][j];
                forcing[i] += e * blocks[i].noise * (w * uv[i]);
            }
        }
        for i in 0..y.len() {
            y[i] = step_s[i] * y[i] + forcing[i];
            if !(y[i][0].is_finite() && y[i][1].is_finite()) {
                return Err(Error::NonFiniteState { step: k + 1 });
            }
        }
    }
    Ok(y)
}

/// `‖Γ_{t,n} h‖` from blocks where `Q_t` has condition number below `1e12`;
/// the second entry counts skipped blocks.
pub fn gamma_lower_bound(problem: &ControlProblem) -> Result<(f64, usize)> {
    let blocks = problem.model.blocks_upto(problem.n())?;
    let mut acc = 0.0;
    let mut skipped = 0;
    for (b, h) in blocks.iter().zip(&problem.h) {
        match gamma_block(b, problem.t) {
            Ok((g, cond)) if cond < 1e12 => acc += (g * h).norm_squared(),
            _ => skipped += 1,
        }
    }
    Ok((acc.sqrt(), skipped))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyVariant {
    /// `sup_{‖h‖=1} 𝓔(t, h)`.
    State,
    /// `sup_a 𝓔(t, G_n a) / ‖G_n a‖`.
    GA,
}

/// Worst-case energy ratio over the first `n` modes at horizon `t`.
pub fn worst_energy(model: &SpectralModel, n: usize, t: f64, variant: EnergyVariant) -> Result<f64> {
    let (_, gamma) = model.weights();
    let profile = phi_profile(t, profile_order(model.alpha, gamma))?;
    let blocks = model.blocks_upto(n)?;
    let vals = blocks
        .par_iter()
        .map(|b| {
            let m = energy_matrix(b, &profile)?;
            Ok(match variant {
                EnergyVariant::State => sym_max_eig(&m).max(0.0).sqrt(),
                // h = G e_n is parallel to the second coordinate
                EnergyVariant::GA => m[(1, 1)].max(0.0).sqrt(),
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(vals.into_iter().fold(0.0, f64::max))
}

/// Log-log slope of the worst-case energy over a decreasing `t_grid`.
pub fn energy_scaling(model: &SpectralModel, n: usize, t_grid: &[f64], variant: EnergyVariant) -> Result<ExponentFit> {
    let samples = t_grid.iter().map(|&t| Ok((t, worst_energy(model, n, t, variant)?))).collect::<Result<Vec<_>>>()?;
    fit_exponent(&samples)
}

/// Reference exponent of the energy bound for the given variant.
pub fn energy_exponent(alpha: f64, gamma: f64, variant: EnergyVariant) -> f64 {
    match variant {
        EnergyVariant::State if gamma <= alpha => -1.5,
        _ => -(0.5 + gamma / alpha),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_constants() {
        assert_eq!(phi_profile(1.0, 2).unwrap().c_m, 12.0);
        assert_eq!(phi_profile(2.0, 1).unwrap().c_m, 0.75);
        for (t, m) in [(0.3, 1), (1.0, 3), (2.5, 2)] {
            let p = phi_profile(t, m).unwrap();
            let mass = quad::adaptive_scalar(|x| p.phi(x), 0.0, t, 1e-14, 100).unwrap();
            assert!((mass - 1.0).abs() < 1e-12);
            let d = 1e-6;
            let fd = (p.phi(0.4 * t + d) - p.phi(0.4 * t - d)) / (2.0 * d);
            assert!((fd - p.dphi(0.4 * t)).abs() < 1e-6 * p.dphi(0.4 * t).abs().max(1.0));
        }
    }

    #[test]
    fn profile_order_is_smallest() {
        assert_eq!(profile_order(0.4, 0.1), 1);
        assert_eq!(profile_order(0.3, 0.45), 2);
        assert_eq!(profile_order(0.2, 0.5), 3);
    }

    #[test]
    fn steers_to_zero() {
        let model = SpectralModel::damped_wave(0.4, 1.0, 0.1, 0.15, 0.9, 6);
        let h: Vec<Vec2> = (0..6).map(|k| Vec2::new(1.0, -0.5 / (k + 1) as f64)).collect();
        let p = ControlProblem::new(model, 0.5, h.clone()).unwrap();
        let sig = build_control(&p).unwrap();
        let y = integrate_controlled(&p, |tau| sig.eval(tau), 400).unwrap();
        let hn: f64 = h.iter().map(|v| v.norm_squared()).sum::<f64>().sqrt();
        let yn: f64 = y.iter().map(|v| v.norm_squared()).sum::<f64>().sqrt();
        assert!(yn <= 1e-8 * hn, "{yn}");
        assert!(sig.samples[0].iter().chain(sig.samples.last().unwrap()).all(|v| v.abs() < 1e-12));
        let (lb, _) = gamma_lower_bound(&p).unwrap();
        assert!(sig.energy >= lb * (1.0 - 1e-6));
    }

    #[test]
    fn energy_is_homogeneous() {
        let model = SpectralModel::damped_wave(0.4, 1.0, 0.1, 0.15, 0.9, 3);
        let h = vec![Vec2::new(0.3, 1.0); 3];
        let e1 = build_control(&ControlProblem::new(model.clone(), 0.5, h.clone()).unwrap()).unwrap().energy;
        let h2: Vec<Vec2> = h.iter().map(|v| v * -2.0).collect();
        let e2 = build_control(&ControlProblem::new(model, 0.5, h2).unwrap()).unwrap().energy;
        assert!((e2 - 2.0 * e1).abs() < 1e-12 * e1);
    }
}
