//! Drift specifications with declared Hölder data.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dst::SineTransform;
use crate::error::{Error, Result};
use crate::linalg::Vec2;
use crate::spectral::EigenBlock;

/// Scalar profile `p` applied to a mode's displacement amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    /// `sgn(u)·min(|u|, 1)^θ`.
    HolderSign {
        theta: f64,
    },
    Sine,
    Tanh,
    Linear,
    Constant,
}

impl Profile {
    pub fn eval(self, u: f64) -> f64 {
        match self {
            Profile::HolderSign { theta } => u.signum() * u.abs().min(1.0).powf(theta),
            Profile::Sine => u.sin(),
            Profile::Tanh => u.tanh(),
            Profile::Linear => u,
            Profile::Constant => 1.0,
        }
    }

    fn sup(self) -> f64 {
        match self {
            Profile::Linear => f64::INFINITY,
            _ => 1.0,
        }
    }

    /// Upper bound on the `θ`-Hölder seminorm.
    fn seminorm(self, theta: f64) -> f64 {
        match self {
            Profile::HolderSign { theta: p } if p >= theta => 2f64.powf(1.0 - theta),
            Profile::HolderSign { .. } => f64::INFINITY,
            Profile::Sine | Profile::Tanh => 2f64.powf(1.0 - theta),
            Profile::Linear => {
                if theta == 1.0 {
                    1.0
                } else {
                    f64::INFINITY
                }
            }
            Profile::Constant => 0.0,
        }
    }
}

type PointFn = dyn Fn(f64, f64, f64) -> f64 + Send + Sync;

/// Superposition operator `u ↦ c(ξ, u(ξ), ∂_t u(ξ))` on `(0, π)` projected
/// back onto the sine modes.
#[derive(Clone)]
pub struct Nemytskii {
    c: Arc<PointFn>,
    /// Hölder constant in `y`: `|c(ξ,a,v) − c(ξ,b,v)| ≤ c1·|a−b|^θ`.
    pub c1: f64,
    /// `sup |c|`.
    pub c2: f64,
    transform: SineTransform,
    grid: Vec<f64>,
}

impl fmt::Debug for Nemytskii {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Nemytskii").field("c1", &self.c1).field("c2", &self.c2).field("grid", &self.transform.len()).finish()
    }
}

impl Nemytskii {
    /// `grid` is the number of intervals of the collocation grid on `(0, π)`.
    pub fn new(c: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static, c1: f64, c2: f64, grid: usize) -> Self {
        let transform = SineTransform::new(grid);
        let grid = transform.grid();
        Self { c: Arc::new(c), c1, c2, transform, grid }
    }

    pub fn point(&self, xi: f64, y: f64, v: f64) -> f64 {
        (self.c)(xi, y, v)
    }

    pub fn max_modes(&self) -> usize {
        self.transform.len() - 1
    }

    /// Mode forcings for displacement and velocity coefficients.
    pub fn project(&self, disp: &[f64], vel: &[f64]) -> Vec<f64> {
        let u = self.transform.synthesize(disp);
        let w = self.transform.synthesize(vel);
        let vals: Vec<f64> = self.grid.iter().zip(u.iter().zip(&w)).map(|(&xi, (&a, &b))| (self.c)(xi, a, b)).collect();
        self.transform.analyze(&vals, disp.len())
    }
}

#[derive(Debug, Clone)]
pub enum DriftKind {
    Zero,
    /// `B^n(x) = amplitude · n^{-decay} · profile(y_n)`.
    ModeCoefficients {
        amplitude: f64,
        decay: f64,
        profile: Profile,
    },
    Nemytskii(Nemytskii),
    Counterexample(Nemytskii),
}

/// A drift `B` acting through one scalar forcing per block, with declared
/// Hölder exponent `theta`.
#[derive(Debug, Clone)]
pub struct DriftSpec {
    pub kind: DriftKind,
    pub theta: f64,
}

impl DriftSpec {
    pub fn zero() -> Self {
        Self { kind: DriftKind::Zero, theta: 1.0 }
    }

    pub fn mode_coefficients(amplitude: f64, decay: f64, profile: Profile, theta: f64) -> Self {
        Self { kind: DriftKind::ModeCoefficients { amplitude, decay, profile }, theta }
    }

    pub fn nemytskii(n: Nemytskii, theta: f64) -> Self {
        Self { kind: DriftKind::Nemytskii(n), theta }
    }

    pub fn is_zero(&self) -> bool {
        match &self.kind {
            DriftKind::Zero => true,
            DriftKind::ModeCoefficients { amplitude, .. } => *amplitude == 0.0,
            _ => false,
        }
    }

    fn nemytskii_ref(&self) -> Option<&Nemytskii> {
        match &self.kind {
            DriftKind::Nemytskii(n) | DriftKind::Counterexample(n) => Some(n),
            _ => None,
        }
    }

    /// Checks that the drift can act on the first `n` blocks of a model
    /// whose modes are the sine functions on `(0, π)`.
    pub fn supports(&self, blocks: &[EigenBlock], sine_modes: bool) -> Result<()> {
        if let Some(nm) = self.nemytskii_ref() {
            if !sine_modes {
                return Err(Error::UnsupportedFamily("superposition drifts need the one-dimensional sine basis".into()));
            }
            if blocks.len() > nm.max_modes() {
                return Err(Error::InvalidParameter(format!("{} modes exceed the collocation grid ({} modes)", blocks.len(), nm.max_modes())));
            }
        }
        Ok(())
    }

    /// `sup_n sup_x |B^n(x)|`.
    pub fn sup_norm(&self) -> f64 {
        match &self.kind {
            DriftKind::Zero => 0.0,
            DriftKind::ModeCoefficients { amplitude, decay, profile } => {
                if *amplitude == 0.0 {
                    0.0
                } else if *decay < 0.0 {
                    f64::INFINITY
                } else {
                    amplitude.abs() * profile.sup()
                }
            }
            DriftKind::Nemytskii(n) | DriftKind::Counterexample(n) => n.c2 * std::f64::consts::PI.sqrt(),
        }
    }

    /// Exponent `q` of the declared decay `‖B^n‖ ≲ n^{-q}`.
    pub fn mode_norm_decay(&self) -> f64 {
        match &self.kind {
            DriftKind::ModeCoefficients { decay, .. } => *decay,
            _ => 0.0,
        }
    }

    /// Declared bound on `‖B^n‖_{C_b^θ}` for the mode of `block`.
    pub fn mode_holder_norm(&self, block: &EigenBlock) -> f64 {
        match &self.kind {
            DriftKind::Zero => 0.0,
            DriftKind::ModeCoefficients { amplitude, decay, profile } => {
                let w = amplitude.abs() * (block.index as f64).powf(-decay);
                w * (profile.sup() + profile.seminorm(self.theta) * block.disp_scale.abs().powf(self.theta))
            }
            DriftKind::Nemytskii(n) | DriftKind::Counterexample(n) => {
                let pi = std::f64::consts::PI;
                let lip = block.disp_scale.abs().max(block.vel_scale.abs()).max(1.0);
                n.c2 * pi.sqrt() + n.c1 * pi.powf(0.5 * (1.0 - self.theta)) * lip.powf(self.theta)
            }
        }
    }

    /// One forcing per block for the state `x` (padded coordinates).
    pub fn forcing(&self, blocks: &[EigenBlock], x: &[Vec2], out: &mut [f64]) {
        match &self.kind {
            DriftKind::Zero => out.iter_mut().for_each(|v| *v = 0.0),
            DriftKind::ModeCoefficients { amplitude, decay, profile } => {
                for ((b, xi), o) in blocks.iter().zip(x).zip(out.iter_mut()) {
                    let w = amplitude * (b.index as f64).powf(-decay);
                    *o = w * profile.eval(b.disp_scale * xi[0]);
                }
            }
            DriftKind::Nemytskii(n) | DriftKind::Counterexample(n) => {
                let disp: Vec<f64> = blocks.iter().zip(x).map(|(b, xi)| b.disp_scale * xi[0]).collect();
                let vel: Vec<f64> = blocks.iter().zip(x).map(|(b, xi)| b.vel_scale * xi[1]).collect();
                out.copy_from_slice(&n.project(&disp, &vel));
            }
        }
    }

    pub fn forcing_vec(&self, blocks: &[EigenBlock], x: &[Vec2]) -> Vec<f64> {
        let mut out = vec![0.0; blocks.len()];
        self.forcing(blocks, x, &mut out);
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HoelderCheck {
    pub theta: f64,
    pub samples: usize,
    /// Largest observed `|B^n(x) − B^n(x′)| / ‖x − x′‖^θ` per mode.
    pub observed: Vec<f64>,
    /// Declared norms per mode.
    pub declared: Vec<f64>,
    /// `max_n observed/declared`.
    pub worst_ratio: f64,
    pub passes: bool,
}

/// Samples random pairs of states in the ball of radius `radius` and
/// compares the empirical Hölder quotients with the declared mode norms.
pub fn check_hoelder(drift: &DriftSpec, blocks: &[EigenBlock], samples: usize, radius: f64, seed: u64) -> HoelderCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = blocks.len();
    let mut observed = vec![0.0f64; n];
    let draw = |rng: &mut ChaCha8Rng| -> Vec<Vec2> {
        blocks
            .iter()
            .map(|b| {
                let v = Vec2::new(rng.random_range(-radius..radius), rng.random_range(-radius..radius));
                if b.dim == 1 {
                    Vec2::new(v[0], 0.0)
                } else {
                    v
                }
            })
            .collect()
    };
    for k in 0..samples {
        let x = draw(&mut rng);
        // alternate far pairs with close pairs so both regimes of the quotient are probed
        let scale = if k % 2 == 0 { 1.0 } else { 10f64.powf(-rng.random_range(1.0..6.0)) };
        let d = draw(&mut rng);
        let y: Vec<Vec2> = x.iter().zip(&d).map(|(a, b)| a + b * scale).collect();
        let dist = x.iter().zip(&y).zip(blocks).map(|((a, b), bl)| bl.coords_norm(&(a - b)).powi(2)).sum::<f64>().sqrt();
        if dist == 0.0 {
            continue;
        }
        let fx = drift.forcing_vec(blocks, &x);
        let fy = drift.forcing_vec(blocks, &y);
        for i in 0..n {
            let q = (fx[i] - fy[i]).abs() / dist.powf(drift.theta);
            observed[i] = observed[i].max(q).max(fx[i].abs());
        }
    }
    let declared: Vec<f64> = blocks.iter().map(|b| drift.mode_holder_norm(b)).collect();
    let worst_ratio = observed.iter().zip(&declared).map(|(o, d)| if *o == 0.0 { 0.0 } else { o / d }).fold(0.0, f64::max);
    HoelderCheck { theta: drift.theta, samples, observed, declared, worst_ratio, passes: worst_ratio <= 1.0 }
}

fn bump(s: f64) -> f64 {
    if s > 0.0 {
        (-1.0 / s).exp()
    } else {
        0.0
    }
}

/// Smooth cutoff: one on `[−2, 2]`, zero outside `(−3, 3)`.
pub fn counterexample_cutoff(y: f64) -> f64 {
    let a = bump(3.0 - y.abs());
    let b = bump(y.abs() - 2.0);
    if a + b == 0.0 {
        0.0
    } else {
        a / (a + b)
    }
}

/// `c(ξ, y)` driving two distinct solutions from zero data.
pub fn counterexample_c(xi: f64, y: f64) -> f64 {
    let s = (2.0 * xi).sin();
    let sg = if s == 0.0 { 0.0 } else { s.signum() };
    let ay = y.abs();
    let k = 8.0 * 4f64.powf(7.0 / 12.0);
    counterexample_cutoff(y) * (56.0 * sg * s.abs().powf(0.25) * ay.powf(0.75) + k * sg * s.abs().powf(0.125) * ay.powf(0.875) + 4.0 * y)
}

/// The superposition drift built from [`counterexample_c`] on a collocation
/// grid with the interior points of `xi_points`.
pub fn counterexample_drift(xi_points: &[f64]) -> DriftSpec {
    let grid = (xi_points.len() + 1).max(8);
    let k = 8.0 * 4f64.powf(7.0 / 12.0);
    let c2 = 56.0 * 3f64.powf(0.75) + k * 3f64.powf(0.875) + 12.0;
    DriftSpec { kind: DriftKind::Counterexample(Nemytskii::new(|xi, y, _| counterexample_c(xi, y), 400.0, c2, grid)), theta: 0.75 }
}
