//! Per-block spectral data and closed-form block operators.
//!
//! Blocks live in orthonormal physical coordinates. For a damped block the
//! coordinates are `(√μ·y, ẏ)` for a single mode, so the Euclidean norm is
//! the norm of the state space and
//!
//! ```text
//! A = [ 0    √μ    ]      L̃ = diag(0, μ^-σ)      G = (0, μ^-γ)ᵀ
//!     [ -√μ  -ρμ^α ]
//! ```
//!
//! One-dimensional blocks are stored padded: the top-left entry of each
//! `Mat2` is the scalar and everything else is zero. `dim` says which
//! reading applies.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{gram_norm, spectral_norm, Mat2, Vec2};
use crate::quad;

/// Default relative resonance tolerance for `|ρ²μ^{2α} − 4μ|`.
pub const EPS_RES: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct EigenBlock {
    pub index: usize,
    pub mu: f64,
    pub dim: usize,
    pub lambda_plus: Complex64,
    pub lambda_minus: Complex64,
    pub chi: f64,
    pub b_plus: f64,
    pub b_minus: f64,
    pub e_norm: f64,
    /// Gram matrix of the basis columns of `basis`.
    pub gram: Mat2,
    pub zeta: f64,
    /// Generator in physical coordinates.
    pub generator: Mat2,
    /// Columns Φ⁺, Φ⁻ (or real and imaginary parts for a complex pair).
    pub basis: Mat2,
    pub basis_inv: Mat2,
    pub ltilde: Mat2,
    /// Physical coordinates of `G` applied to the block's noise mode.
    pub noise: Vec2,
    /// Physical coordinates of `G̃` applied to the unit noise mode.
    pub noise_dir: Vec2,
    /// Multiplier of `𝒱` on this mode.
    pub v_mult: f64,
    /// Multiplier of `𝒦` on this mode.
    pub k_mult: f64,
    pub psi_plus: Vec2,
    pub psi_minus: Vec2,
    /// Maps the first coordinate to the mode's displacement amplitude.
    pub disp_scale: f64,
    /// Maps the second coordinate to the mode's velocity amplitude.
    pub vel_scale: f64,
}

impl EigenBlock {
    pub fn is_complex(&self) -> bool {
        self.lambda_plus.im != 0.0
    }

    /// Euclidean norm of the coordinates `x` (first `dim` entries).
    pub fn coords_norm(&self, x: &Vec2) -> f64 {
        if self.dim == 1 {
            x[0].abs()
        } else {
            x.norm()
        }
    }
}

pub(crate) fn pad(x: f64) -> Mat2 {
    Mat2::new(x, 0.0, 0.0, 0.0)
}

/// A damped block with `σ = γ = 0`; see [`damped_block`] for the weighted form.
pub fn build_damped_block(mu: f64, rho: f64, alpha: f64) -> Result<EigenBlock> {
    damped_block(1, mu, rho, alpha, 0.0, 0.0, EPS_RES)
}

/// Damped block of index `index`: eigenvalues of `λ² + ρμ^α λ + μ = 0`,
/// basis, coefficients and weights for `L̃ = Λ^{-σ}` and `𝒱 = Λ^{-γ}`.
pub fn damped_block(index: usize, mu: f64, rho: f64, alpha: f64, sigma: f64, gamma: f64, eps_res: f64) -> Result<EigenBlock> {
    if !(mu > 0.0) || !(rho > 0.0) || !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("damped block needs mu > 0, rho > 0, alpha in (0,1); got ({mu}, {rho}, {alpha})")));
    }
    let damp = rho * mu.powf(alpha);
    let disc = damp * damp - 4.0 * mu;
    if disc.abs() <= eps_res * (4.0 * mu).max(1.0) {
        return Err(Error::ResonantEigenvalue { mu, rho, alpha, discriminant: disc });
    }
    let sm = mu.sqrt();
    let (lp, lm, basis, chi, e_norm) = if disc > 0.0 {
        let lm = -0.5 * (damp + disc.sqrt());
        // the small root from the product so that it carries no cancellation
        let lp = mu / lm;
        let e_norm = 1.0 / (mu + lp * lp).sqrt();
        let chi = ((mu + lp * lp) / (mu + lm * lm)).sqrt();
        let basis = Mat2::new(e_norm * sm, chi * e_norm * sm, e_norm * lp, chi * e_norm * lm);
        (Complex64::new(lp, 0.0), Complex64::new(lm, 0.0), basis, chi, e_norm)
    } else {
        let a = -0.5 * damp;
        let b = 0.5 * (-disc).sqrt();
        let e_norm = 1.0 / (mu + a * a + b * b).sqrt();
        let basis = Mat2::new(e_norm * sm, 0.0, e_norm * a, e_norm * b);
        (Complex64::new(a, b), Complex64::new(a, -b), basis, 1.0, e_norm)
    };
    let basis_inv = basis.try_inverse().ok_or(Error::ResonantEigenvalue { mu, rho, alpha, discriminant: disc })?;
    let coeff = basis_inv * Vec2::new(0.0, 1.0);
    let psi = |l: Complex64| -> (Vec2, Vec2) {
        let n = (mu + l.norm_sqr()).sqrt();
        (Vec2::new(-sm / n, l.re / n), Vec2::new(0.0, l.im / n))
    };
    let (psi_plus, psi_minus) = if disc > 0.0 { (psi(lp).0, psi(lm).0) } else { psi(lp) };
    let generator = Mat2::new(0.0, sm, -sm, -damp);
    let k_mult = mu.powf(-sigma);
    let v_mult = mu.powf(-gamma);
    let gram = basis.transpose() * basis;
    Ok(EigenBlock {
        index,
        mu,
        dim: 2,
        lambda_plus: lp,
        lambda_minus: lm,
        chi,
        b_plus: coeff[0],
        b_minus: coeff[1],
        e_norm,
        gram,
        zeta: k_mult,
        generator,
        basis,
        basis_inv,
        ltilde: Mat2::new(0.0, 0.0, 0.0, k_mult),
        noise: Vec2::new(0.0, v_mult),
        noise_dir: Vec2::new(0.0, 1.0),
        v_mult,
        k_mult,
        psi_plus,
        psi_minus,
        disp_scale: 1.0 / sm,
        vel_scale: 1.0,
    })
}

/// One-dimensional block for the fractional heat family: `A = −λ^β`,
/// `L̃ = λ^{-σ}`, `G = λ^{-γ/2}` on the mode with Laplace eigenvalue `lambda`.
pub fn heat_block(index: usize, lambda: f64, beta: f64, sigma: f64, gamma: f64) -> EigenBlock {
    let a = -lambda.powf(beta);
    let k_mult = lambda.powf(-sigma);
    let v_mult = lambda.powf(-0.5 * gamma);
    EigenBlock {
        index,
        mu: lambda,
        dim: 1,
        lambda_plus: Complex64::new(a, 0.0),
        lambda_minus: Complex64::new(a, 0.0),
        chi: 1.0,
        b_plus: 1.0,
        b_minus: 0.0,
        e_norm: 1.0,
        gram: pad(1.0),
        zeta: k_mult,
        generator: pad(a),
        basis: pad(1.0),
        basis_inv: pad(1.0),
        ltilde: pad(k_mult),
        noise: Vec2::new(v_mult, 0.0),
        noise_dir: Vec2::new(1.0, 0.0),
        v_mult,
        k_mult,
        psi_plus: Vec2::new(1.0, 0.0),
        psi_minus: Vec2::new(1.0, 0.0),
        disp_scale: 1.0,
        vel_scale: 0.0,
    }
}

/// Gram matrix `⟨Φ_i, Φ_j⟩` of `Φ⁺ = ‖e‖(√μ, λ⁺)`, `Φ⁻ = χ‖e‖(√μ, λ⁻)`
/// for real distinct eigenvalues.
pub fn gram_matrix(mu: f64, lambda_plus: f64, lambda_minus: f64, e_norm: f64, chi: f64) -> Mat2 {
    let e2 = e_norm * e_norm;
    let pp = e2 * (mu + lambda_plus * lambda_plus);
    let pm = e2 * chi * (mu + lambda_plus * lambda_minus);
    let mm = e2 * chi * chi * (mu + lambda_minus * lambda_minus);
    Mat2::new(pp, pm, pm, mm)
}

/// The generator in basis coordinates: `diag(λ⁺, λ⁻)` or, for a pair
/// `a ± ib`, the rotation–scaling `[[a, b], [−b, a]]`.
pub fn modal_generator(block: &EigenBlock) -> Mat2 {
    if block.dim == 1 {
        return pad(block.lambda_plus.re);
    }
    let (lp, lm) = (block.lambda_plus, block.lambda_minus);
    if block.is_complex() {
        Mat2::new(lp.re, lp.im, -lp.im, lp.re)
    } else {
        Mat2::new(lp.re, 0.0, 0.0, lm.re)
    }
}

/// `e^{tA}` on the block in basis coordinates.
pub fn block_semigroup(block: &EigenBlock, t: f64) -> Mat2 {
    if block.dim == 1 {
        return pad((block.lambda_plus.re * t).exp());
    }
    let (lp, lm) = (block.lambda_plus, block.lambda_minus);
    if block.is_complex() {
        let g = (lp.re * t).exp();
        let (s, c) = (lp.im * t).sin_cos();
        Mat2::new(g * c, g * s, -g * s, g * c)
    } else {
        Mat2::new((lp.re * t).exp(), 0.0, 0.0, (lm.re * t).exp())
    }
}

/// `e^{tA}` on the block in physical coordinates, written as
/// `c(t)·I + s(t)·(A − m I)` with `m` half the trace.
pub fn semigroup_phys(block: &EigenBlock, t: f64) -> Mat2 {
    if block.dim == 1 {
        return pad((block.lambda_plus.re * t).exp());
    }
    let (c, s) = semigroup_coeffs(block, t);
    let a = &block.generator;
    let m = 0.5 * a.trace();
    c * Mat2::identity() + s * (a - m * Mat2::identity())
}

fn semigroup_coeffs(block: &EigenBlock, t: f64) -> (f64, f64) {
    let (lp, lm) = (block.lambda_plus, block.lambda_minus);
    let m = 0.5 * (lp.re + lm.re);
    if block.is_complex() {
        let w = lp.im;
        let g = (m * t).exp();
        let (sn, cs) = (w * t).sin_cos();
        return (g * cs, g * sn / w);
    }
    let d = 0.5 * (lp.re - lm.re);
    let dt = d * t;
    if dt > 0.5 {
        let (ep, em) = ((lp.re * t).exp(), (lm.re * t).exp());
        (0.5 * (ep + em), (ep - em) / (2.0 * d))
    } else {
        let g = (m * t).exp();
        let sinhc = if dt == 0.0 { 1.0 } else { dt.sinh() / dt };
        (g * dt.cosh(), g * t * sinhc)
    }
}

/// `Φ₁(h) = ∫₀^h e^{sA} ds` in physical coordinates.
pub fn phi1_phys(block: &EigenBlock, h: f64) -> Mat2 {
    if block.dim == 1 {
        let l = block.lambda_plus.re;
        let v = if l == 0.0 { h } else { (l * h).exp_m1() / l };
        return pad(v);
    }
    let a = block.generator;
    if spectral_norm(&a) * h > 1.0 {
        let ai = a.try_inverse().expect("damped generator is invertible");
        ai * (semigroup_phys(block, h) - Mat2::identity())
    } else {
        // Σ h^{k+1} A^k / (k+1)!
        let mut term = h * Mat2::identity();
        let mut sum = term;
        for k in 1..40 {
            term = term * a * (h / (k as f64 + 1.0));
            sum += term;
            if term.norm() <= 1e-18 * sum.norm() {
                break;
            }
        }
        sum
    }
}

/// `∫₀^h e^{sλ} ds` for complex `λ`, stable as `λh → 0`.
pub fn phi1_scalar(l: Complex64, h: f64) -> Complex64 {
    let z = l * h;
    if z.norm() < 1e-3 {
        h * (Complex64::new(1.0, 0.0) + z / 2.0 + z * z / 6.0 + z * z * z / 24.0)
    } else {
        let em1 = if z.im == 0.0 {
            Complex64::new(z.re.exp_m1(), 0.0)
        } else {
            // e^z − 1 = expm1(re)·e^{i im} + (e^{i im} − 1), the second via 2i·sin(im/2)·e^{i im/2}
            let rot = Complex64::new(0.0, z.im).exp();
            let half = Complex64::new(0.0, 0.5 * z.im).exp();
            z.re.exp_m1() * rot + Complex64::new(0.0, 2.0 * (0.5 * z.im).sin()) * half
        };
        em1 / l
    }
}

/// `A e^{tA} L̃` on the block, in physical coordinates.
pub fn a_eta_ltilde_phys(block: &EigenBlock, t: f64) -> Mat2 {
    block.generator * semigroup_phys(block, t) * block.ltilde
}

/// Norm of `A e^{tA} L̃` restricted to one block, measured in basis
/// coordinates with the Gram inner product.
pub fn a_eta_ltilde_block_norm(block: &EigenBlock, t: f64) -> f64 {
    if block.dim == 1 {
        return (block.lambda_plus.re * (block.lambda_plus.re * t).exp() * block.k_mult).abs();
    }
    let l_modal = block.basis_inv * block.ltilde * block.basis;
    let m = modal_generator(block) * block_semigroup(block, t) * l_modal;
    gram_norm(&m, &block.gram)
}

/// `‖A e^{tA} L̃‖` on `H_n`: maximum of the block norms.
pub fn a_eta_ltilde_norm(blocks: &[EigenBlock], t: f64) -> f64 {
    blocks.iter().map(|b| a_eta_ltilde_block_norm(b, t)).fold(0.0, f64::max)
}

/// `ζ = ‖L̃‖` on the block through the Gram route; equals `μ^{-σ}`.
pub fn zeta_via_gram(block: &EigenBlock) -> f64 {
    if block.dim == 1 {
        return block.k_mult.abs();
    }
    let l_modal = block.basis_inv * block.ltilde * block.basis;
    gram_norm(&l_modal, &block.gram)
}

/// `Q_t = ∫₀^t e^{sA} G Gᵀ e^{sA*} ds` on one block in physical coordinates.
/// Scalar blocks use the closed form; pairs use adaptive Gauss–Legendre
/// with relative tolerance `rtol` per entry.
pub fn q_block(block: &EigenBlock, t: f64, rtol: f64) -> Result<Mat2> {
    if block.dim == 1 {
        let l = block.lambda_plus.re;
        let g2 = block.noise[0] * block.noise[0];
        // g²(1 − e^{2lt})/(−2l)
        let v = g2 * (2.0 * l * t).exp_m1() / (2.0 * l);
        return Ok(pad(v));
    }
    if block.noise.norm() == 0.0 || t == 0.0 {
        return Ok(Mat2::zeros());
    }
    let g = block.noise;
    let v = quad::adaptive(
        |s| {
            let x = semigroup_phys(block, s) * g;
            [x[0] * x[0], x[0] * x[1], x[1] * x[1]]
        },
        0.0,
        t,
        rtol,
        20_000,
    )
    .map_err(|e| match e {
        Error::QuadratureFailure { what, tol } => Error::QuadratureFailure { what: format!("Q_t on block {}: {what}", block.index), tol },
        other => other,
    })?;
    Ok(Mat2::new(v[0], v[1], v[1], v[2]))
}

/// Operator collection, one small matrix per block, in physical coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockOperator {
    pub kind: OperatorKind,
    pub dims: Vec<usize>,
    pub blocks: Vec<Mat2>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OperatorKind {
    A,
    Semigroup(f64),
    Ltilde,
    GColumn,
    AetALtilde(f64),
    Qt(f64),
    Gamma(f64),
}

impl BlockOperator {
    pub fn build(blocks: &[EigenBlock], kind: OperatorKind) -> Result<Self> {
        let mats = blocks
            .iter()
            .map(|b| -> Result<Mat2> {
                Ok(match kind {
                    OperatorKind::A => b.generator,
                    OperatorKind::Semigroup(t) => semigroup_phys(b, t),
                    OperatorKind::Ltilde => b.ltilde,
                    OperatorKind::GColumn => Mat2::from_columns(&[b.noise, Vec2::zeros()]),
                    OperatorKind::AetALtilde(t) => a_eta_ltilde_phys(b, t),
                    OperatorKind::Qt(t) => q_block(b, t, 1e-10)?,
                    OperatorKind::Gamma(t) => gamma_block(b, t)?.0,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { kind, dims: blocks.iter().map(|b| b.dim).collect(), blocks: mats })
    }

    /// Largest block operator norm.
    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(spectral_norm).fold(0.0, f64::max)
    }
}

/// `Γ_s = Q_s^{-1/2} e^{sA}` on one block with the condition number of `Q_s`.
pub fn gamma_block(block: &EigenBlock, s: f64) -> Result<(Mat2, f64)> {
    let q = q_block(block, s, 1e-10)?;
    let e = semigroup_phys(block, s);
    if block.dim == 1 {
        if !(q[(0, 0)] > 0.0) {
            return Err(Error::SingularQt { index: block.index, s, cond: f64::INFINITY });
        }
        return Ok((pad(e[(0, 0)] / q[(0, 0)].sqrt()), 1.0));
    }
    let cond = crate::linalg::sym_condition(&q);
    if !(cond < 1e14) {
        return Err(Error::SingularQt { index: block.index, s, cond });
    }
    let qi = crate::linalg::sym_inv_sqrt(&q).ok_or(Error::SingularQt { index: block.index, s, cond })?;
    Ok((qi * e, cond))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_block_example() {
        let b = build_damped_block(1.0, 3.0, 0.5).unwrap();
        let s5 = 5f64.sqrt();
        assert!((b.lambda_plus.re - (-3.0 + s5) / 2.0).abs() < 1e-15);
        assert!((b.lambda_minus.re - (-3.0 - s5) / 2.0).abs() < 1e-15);
        assert!(!b.is_complex());
        let den = b.e_norm * (b.lambda_plus.re - b.lambda_minus.re);
        assert!((b.b_plus - 1.0 / den).abs() < 1e-13 * b.b_plus.abs());
        assert!((b.b_minus + 1.0 / (b.chi * den)).abs() < 1e-13 * b.b_minus.abs());
        assert!((b.basis.column(0).norm() - 1.0).abs() < 1e-14);
        assert!((b.basis.column(1).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn complex_block_example() {
        let b = build_damped_block(4.0, 1.0, 0.5).unwrap();
        assert!((b.lambda_plus.re + 1.0).abs() < 1e-15);
        assert!((b.lambda_plus.im - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(b.lambda_minus, b.lambda_plus.conj());
        assert_eq!(b.b_plus, 0.0);
    }

    #[test]
    fn resonance_is_rejected() {
        assert!(matches!(build_damped_block(5.0, 2.0, 0.5), Err(Error::ResonantEigenvalue { .. })));
    }

    #[test]
    fn gram_example() {
        let s5 = 5f64.sqrt();
        let g = gram_matrix(1.0, (-3.0 + s5) / 2.0, (-3.0 - s5) / 2.0, 1.0, 1.0);
        assert!((g[(0, 0)] - 1.1458980337503155).abs() < 1e-12);
        assert!((g[(0, 1)] - 2.0).abs() < 1e-12);
        assert!((g[(1, 1)] - 7.854101966249685).abs() < 1e-12);
    }

    #[test]
    fn modal_and_physical_semigroups_agree() {
        for &(mu, rho, alpha) in &[(1.0, 3.0, 0.5), (4.0, 1.0, 0.5), (400.0, 0.7, 0.8), (1e4, 2.0, 0.3)] {
            let b = build_damped_block(mu, rho, alpha).unwrap();
            for &t in &[0.0, 1e-5, 0.01, 0.3, 2.0] {
                let via_basis = b.basis * block_semigroup(&b, t) * b.basis_inv;
                let phys = semigroup_phys(&b, t);
                assert!((via_basis - phys).norm() <= 1e-12 * (1.0 + phys.norm()), "{mu} {t}");
            }
        }
    }

    #[test]
    fn half_rotation() {
        let b = build_damped_block(4.0, 1.0, 0.5).unwrap();
        let t = std::f64::consts::PI / 3f64.sqrt();
        let s = block_semigroup(&b, t);
        let want = -(-t).exp();
        assert!((s - want * Mat2::identity()).norm() < 1e-15);
    }

    #[test]
    fn phi1_branches_agree() {
        let b = build_damped_block(50.0, 1.0, 0.5).unwrap();
        let norm_a = spectral_norm(&b.generator);
        let h = 1.0 / norm_a;
        let taylor = phi1_phys(&b, h * (1.0 - 1e-9));
        let inv = phi1_phys(&b, h * (1.0 + 1e-9));
        assert!((taylor - inv).norm() < 1e-8 * taylor.norm());
        let quadv = quad::adaptive(
            |s| {
                let m = semigroup_phys(&b, s);
                [m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]]
            },
            0.0,
            0.4,
            1e-13,
            1000,
        )
        .unwrap();
        let p = phi1_phys(&b, 0.4);
        let q = Mat2::new(quadv[0], quadv[1], quadv[2], quadv[3]);
        assert!((p - q).norm() < 1e-11 * p.norm());
    }

    #[test]
    fn phi1_scalar_matches_direct() {
        let l = Complex64::new(-2.0, 30.0);
        let h = 0.1;
        let direct = ((l * h).exp() - 1.0) / l;
        assert!((phi1_scalar(l, h) - direct).norm() < 1e-14);
        let small = phi1_scalar(Complex64::new(-1e-6, 1e-6), 1.0);
        assert!((small.re - 1.0).abs() < 1e-6);
    }

    #[test]
    fn heat_q_closed_form() {
        let b = heat_block(1, 1.0, 1.0, 0.0, 0.0);
        let q = q_block(&b, 1.0, 1e-10).unwrap();
        assert!((q[(0, 0)] - 0.43233235838169365).abs() < 1e-15);
    }

    #[test]
    fn zeta_routes_agree() {
        let b = damped_block(3, 9.0, 1.0, 0.4, 0.25, 0.1, EPS_RES).unwrap();
        assert!((zeta_via_gram(&b) - 9f64.powf(-0.25)).abs() < 1e-12);
    }
}
