//! Concrete equations: heat, damped wave, beam and the damped wave on the
//! shifted scale of spaces.

mod conditions;
mod drift;
mod hypotheses;

pub use conditions::{check_theorem_conditions, AdmissibilityReport, Condition};
pub use drift::{check_hoelder, counterexample_c, counterexample_cutoff, counterexample_drift, DriftKind, DriftSpec, HoelderCheck, Nemytskii, Profile};
pub use hypotheses::{gamma_integrability, q_t, series_condition, trace_integrability, GammaReport, SeriesReport, TraceReport, TraceRow};

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{Mat2, Vec2};
use crate::spectral::{damped_block, heat_block, EigenBlock, EPS_RES};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Heat,
    DampedWave,
    Beam,
    DampedWaveXi,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Heat => "heat",
            Family::DampedWave => "damped_wave",
            Family::Beam => "beam",
            Family::DampedWaveXi => "damped_wave_xi",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "heat" => Family::Heat,
            "damped_wave" => Family::DampedWave,
            "beam" => Family::Beam,
            "damped_wave_xi" => Family::DampedWaveXi,
            _ => return None,
        })
    }
}

/// How the eigenvalues of the spatial operator are produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EigenLaw {
    /// `c · n^δ`.
    Power { c: f64, delta: f64 },
    /// Sorted `(k₁² + … + k_m²)^p` over `k ∈ ℕ^m`: the Dirichlet Laplacian
    /// on `(0, π)^m` for `p = 1`, the bi-Laplacian for `p = 2`.
    DirichletLattice { m: usize, p: f64 },
}

impl EigenLaw {
    pub fn values(&self, n: usize) -> Vec<f64> {
        match *self {
            EigenLaw::Power { c, delta } => (1..=n).map(|k| c * (k as f64).powf(delta)).collect(),
            EigenLaw::DirichletLattice { m, p } => lattice_values(m, n).into_iter().map(|v| (v as f64).powf(p)).collect(),
        }
    }

    /// `(c, δ)` of the asymptotic law `c·n^δ`, used for tail bounds.
    pub fn tail_law(&self) -> (f64, f64) {
        match *self {
            EigenLaw::Power { c, delta } => (c, delta),
            EigenLaw::DirichletLattice { m, p } => {
                let md = m as f64;
                // volume of the unit ball in m dimensions
                let omega = PI.powf(0.5 * md) / gamma_fn(0.5 * md + 1.0);
                ((2f64.powf(md) / omega).powf(2.0 * p / md), 2.0 * p / md)
            }
        }
    }
}

fn gamma_fn(x: f64) -> f64 {
    // only half-integers and integers up to 2.5 are needed
    match (2.0 * x).round() as i64 {
        2 => 1.0,
        3 => 0.5 * PI.sqrt(),
        4 => 1.0,
        5 => 0.75 * PI.sqrt(),
        _ => panic!("gamma_fn({x}) out of table"),
    }
}

/// First `n` values of `|k|²`, `k ∈ ℕ^m`, ascending with multiplicity.
fn lattice_values(m: usize, n: usize) -> Vec<u64> {
    assert!((1..=3).contains(&m), "spatial dimension must be 1, 2 or 3");
    if m == 1 {
        return (1..=n as u64).map(|k| k * k).collect();
    }
    let mut radius2 = (n as f64).powf(2.0 / m as f64) as u64 * 4 + 16;
    loop {
        let kmax = (radius2 as f64).sqrt() as u64 + 1;
        let mut vals = Vec::new();
        let mut push = |v: u64| {
            if v <= radius2 {
                vals.push(v)
            }
        };
        for a in 1..=kmax {
            for b in 1..=kmax {
                if m == 2 {
                    push(a * a + b * b);
                } else {
                    for c in 1..=kmax {
                        push(a * a + b * b + c * c);
                    }
                }
            }
        }
        if vals.len() >= n {
            vals.sort_unstable();
            vals.truncate(n);
            return vals;
        }
        radius2 *= 2;
    }
}

/// One concrete equation.
///
/// For the heat family the exponent `β` of the generator is stored in
/// `alpha` and `mu` holds the Laplace eigenvalues. For the damped families
/// `mu` are the eigenvalues of `Λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralModel {
    pub family: Family,
    pub alpha: f64,
    pub rho: f64,
    pub gamma: f64,
    pub sigma: f64,
    pub theta: f64,
    pub xi: f64,
    pub m: usize,
    pub law: EigenLaw,
    pub n_max: usize,
    pub eps_res: f64,
    /// Overall factor on `G`; zero switches the noise off.
    pub noise_amp: f64,
}

impl SpectralModel {
    pub fn heat(m: usize, beta: f64, gamma: f64, sigma: f64, theta: f64, n_max: usize) -> Self {
        Self {
            family: Family::Heat,
            alpha: beta,
            rho: 0.0,
            gamma,
            sigma,
            theta,
            xi: 0.0,
            m,
            law: EigenLaw::DirichletLattice { m, p: 1.0 },
            n_max,
            eps_res: EPS_RES,
            noise_amp: 1.0,
        }
    }

    pub fn damped_wave(alpha: f64, rho: f64, gamma: f64, sigma: f64, theta: f64, n_max: usize) -> Self {
        Self {
            family: Family::DampedWave,
            alpha,
            rho,
            gamma,
            sigma,
            theta,
            xi: 0.0,
            m: 1,
            law: EigenLaw::DirichletLattice { m: 1, p: 1.0 },
            n_max,
            eps_res: EPS_RES,
            noise_amp: 1.0,
        }
    }

    pub fn beam(m: usize, alpha: f64, rho: f64, gamma: f64, sigma: f64, theta: f64, n_max: usize) -> Self {
        Self { family: Family::Beam, law: EigenLaw::DirichletLattice { m, p: 2.0 }, m, ..Self::damped_wave(alpha, rho, gamma, sigma, theta, n_max) }
    }

    /// Damped wave with `σ = γ = ξ` on the shifted scale of spaces.
    pub fn damped_wave_xi(alpha: f64, rho: f64, xi: f64, theta: f64, n_max: usize) -> Self {
        Self { family: Family::DampedWaveXi, xi, ..Self::damped_wave(alpha, rho, xi, xi, theta, n_max) }
    }

    pub fn with_law(mut self, law: EigenLaw) -> Self {
        self.law = law;
        self
    }

    pub fn with_noise_amp(mut self, amp: f64) -> Self {
        self.noise_amp = amp;
        self
    }

    pub fn with_n_max(mut self, n_max: usize) -> Self {
        self.n_max = n_max;
        self
    }

    pub fn is_damped(&self) -> bool {
        self.family != Family::Heat
    }

    /// Effective `(σ, γ)`; the ξ-variant ties both to `ξ`.
    pub fn weights(&self) -> (f64, f64) {
        match self.family {
            Family::DampedWaveXi => (self.xi, self.xi),
            _ => (self.sigma, self.gamma),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.n_max == 0 {
            return bad("n_max must be at least 1".into());
        }
        if !(1..=3).contains(&self.m) {
            return bad(format!("spatial dimension m = {} not in 1..=3", self.m));
        }
        if self.gamma < 0.0 || self.sigma < 0.0 {
            return bad("gamma and sigma must be nonnegative".into());
        }
        match self.family {
            Family::Heat => {
                if !(self.alpha > 0.0) {
                    return bad(format!("heat exponent beta = {} must be positive", self.alpha));
                }
            }
            _ => {
                if !(self.alpha > 0.0 && self.alpha < 1.0) || !(self.rho > 0.0) {
                    return bad(format!("damped families need alpha in (0,1) and rho > 0; got alpha = {}, rho = {}", self.alpha, self.rho));
                }
                if self.family == Family::DampedWaveXi && !(self.xi > 0.0 && self.xi <= 0.5) {
                    return bad(format!("xi = {} not in (0, 1/2]", self.xi));
                }
            }
        }
        if let EigenLaw::Power { c, delta } = self.law {
            if !(c > 0.0 && delta > 0.0) {
                return bad("eigenvalue law needs c > 0 and delta > 0".into());
            }
        }
        Ok(())
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.law.values(self.n_max)
    }

    /// All blocks up to `n_max`.
    pub fn blocks(&self) -> Result<Vec<EigenBlock>> {
        self.blocks_upto(self.n_max)
    }

    /// Blocks `1..=n`; identical to the first `n` blocks of any larger truncation.
    pub fn blocks_upto(&self, n: usize) -> Result<Vec<EigenBlock>> {
        self.validate()?;
        let (sigma, gamma) = self.weights();
        let amp = self.noise_amp;
        let scale = move |mut b: EigenBlock| {
            b.noise *= amp;
            b.v_mult *= amp;
            b
        };
        self.law
            .values(n)
            .into_iter()
            .enumerate()
            .map(|(i, mu)| match self.family {
                Family::Heat => Ok(heat_block(i + 1, mu, self.alpha, sigma, gamma)),
                Family::DampedWave | Family::Beam => damped_block(i + 1, mu, self.rho, self.alpha, sigma, gamma, self.eps_res),
                Family::DampedWaveXi => {
                    let mut b = damped_block(i + 1, mu, self.rho, self.alpha, sigma, gamma, self.eps_res)?;
                    b.disp_scale = mu.powf(self.xi - 0.5);
                    b.vel_scale = mu.powf(self.xi);
                    Ok(b)
                }
            })
            .map(|r| r.map(scale))
            .collect()
    }

    /// State dimension of `H_n`.
    pub fn state_dim(&self, n: usize) -> usize {
        if self.is_damped() {
            2 * n
        } else {
            n
        }
    }

    /// `β` of the bound `‖A e^{tA} L̃‖ ≤ C t^{-β}` for the damped families.
    pub fn beta_exponent(&self) -> f64 {
        let (sigma, _) = self.weights();
        if self.alpha < 0.5 {
            (1.0 - 2.0 * sigma).max(0.0) / (2.0 * self.alpha)
        } else {
            (1.0 - sigma / self.alpha).max(0.0)
        }
    }
}

/// Per-block factors `G̃`, `𝒱`, `𝒦` and `L̃`, with `G = G̃𝒱` and `L̃G̃ = G̃𝒦`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorFactorization {
    pub g_tilde: Vec<Vec2>,
    pub v: Vec<f64>,
    pub k: Vec<f64>,
    pub ltilde: Vec<Mat2>,
    pub g: Vec<Vec2>,
}

impl OperatorFactorization {
    pub fn from_blocks(blocks: &[EigenBlock]) -> Self {
        Self {
            g_tilde: blocks.iter().map(|b| b.noise_dir).collect(),
            v: blocks.iter().map(|b| b.v_mult).collect(),
            k: blocks.iter().map(|b| b.k_mult).collect(),
            ltilde: blocks.iter().map(|b| b.ltilde).collect(),
            g: blocks.iter().map(|b| b.noise).collect(),
        }
    }

    /// Largest entry of `L̃G̃ − G̃𝒦` over all blocks.
    pub fn commutation_defect(&self) -> f64 {
        (0..self.k.len()).map(|i| (self.ltilde[i] * self.g_tilde[i] - self.g_tilde[i] * self.k[i]).amax()).fold(0.0, f64::max)
    }

    /// Largest entry of `G − G̃𝒱` over all blocks.
    pub fn factorization_defect(&self) -> f64 {
        (0..self.v.len()).map(|i| (self.g[i] - self.g_tilde[i] * self.v[i]).amax()).fold(0.0, f64::max)
    }
}
