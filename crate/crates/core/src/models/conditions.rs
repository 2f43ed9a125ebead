//! Parameter conditions under which pathwise uniqueness is established for
//! each family, evaluated with signed margins.

use super::{EigenLaw, Family, SpectralModel};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Condition {
    pub name: String,
    pub satisfied: bool,
    /// Distance to the nearest boundary of the admissible set; negative
    /// when the condition is violated.
    pub margin: f64,
    pub citation: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityReport {
    pub target: String,
    pub conditions: Vec<Condition>,
}

impl AdmissibilityReport {
    pub fn all_pass(&self) -> bool {
        self.conditions.iter().all(|c| c.satisfied)
    }

    pub fn failing(&self) -> impl Iterator<Item = &Condition> {
        self.conditions.iter().filter(|c| !c.satisfied)
    }

    pub fn get(&self, name: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.name == name)
    }
}

#[derive(Clone, Copy)]
enum End {
    Open(f64),
    Closed(f64),
    None,
}

fn interval(name: &str, x: f64, lo: End, hi: End, citation: String) -> Condition {
    let (lo_ok, lo_gap) = match lo {
        End::Open(a) => (x > a, x - a),
        End::Closed(a) => (x >= a, x - a),
        End::None => (true, f64::INFINITY),
    };
    let (hi_ok, hi_gap) = match hi {
        End::Open(b) => (x < b, b - x),
        End::Closed(b) => (x <= b, b - x),
        End::None => (true, f64::INFINITY),
    };
    Condition { name: name.to_string(), satisfied: lo_ok && hi_ok, margin: lo_gap.min(hi_gap), citation }
}

fn theta_lower_sectorial(gamma: f64, alpha: f64) -> f64 {
    if gamma + 2.0 * alpha < 1.5 {
        2.0 / 3.0 * (gamma + 1.0 - alpha) / (1.0 - alpha)
    } else {
        (4.0 * gamma + 2.0 * alpha - 1.0) / (2.0 * gamma + alpha)
    }
}

fn resonance_row(model: &SpectralModel, source: &str) -> Condition {
    let margin = model
        .eigenvalues()
        .iter()
        .map(|&mu| {
            let d = model.rho * model.rho * mu.powf(2.0 * model.alpha) - 4.0 * mu;
            d.abs() / (4.0 * mu).max(1.0) - model.eps_res
        })
        .fold(f64::INFINITY, f64::min);
    Condition { name: "resonance".into(), satisfied: margin > 0.0, margin, citation: format!("{source}: ρ² ≠ 4μ_n^(1−2α) for every computed n") }
}

/// Evaluates every inequality of the result that covers `model`.
pub fn check_theorem_conditions(model: &SpectralModel) -> Result<AdmissibilityReport> {
    model.validate()?;
    match model.family {
        Family::Heat => heat(model),
        Family::DampedWave | Family::Beam => damped(model),
        Family::DampedWaveXi => damped_xi(model),
    }
}

fn heat(model: &SpectralModel) -> Result<AdmissibilityReport> {
    if model.law != (EigenLaw::DirichletLattice { m: model.m, p: 1.0 }) {
        return Err(Error::UnsupportedFamily("heat with a non-Laplacian eigenvalue law".into()));
    }
    let (m, beta, gamma, sigma, theta) = (model.m as f64, model.alpha, model.gamma, model.sigma, model.theta);
    let src = "fractional heat equation";
    let lo = (m - 2.0 * beta) / 2.0;
    let hi = beta * theta / (2.0 - theta);
    let conditions = vec![
        interval("theta", theta, End::Open(0.0), End::Open(1.0), format!("{src}: θ ∈ (0, 1)")),
        interval("gamma", gamma, End::Open(lo), End::Open(hi), format!("{src}: (m−2β)/2 < γ < βθ/(2−θ), here ({lo:.6}, {hi:.6})")),
        interval(
            "sigma",
            sigma,
            End::Open(((m - 2.0 * beta) / 4.0).max(0.0)),
            End::None,
            format!("{src}: σ > max(0, (m−2β)/4) = {:.6}", ((m - 2.0 * beta) / 4.0).max(0.0)),
        ),
    ];
    Ok(AdmissibilityReport { target: src.into(), conditions })
}

fn damped(model: &SpectralModel) -> Result<AdmissibilityReport> {
    let (alpha, gamma, sigma, theta) = (model.alpha, model.gamma, model.sigma, model.theta);
    let (_, delta) = model.law.tail_law();
    let small = alpha <= 0.5;
    let case = if small { "(i)" } else { "(ii)" };
    let theta_lo = if small { 2.0 / 3.0 * (gamma + alpha) / alpha } else { theta_lower_sectorial(gamma, alpha) };
    let theta_text = if small {
        "θ ∈ (⅔(γ+α)/α, 1)".to_string()
    } else if gamma + 2.0 * alpha < 1.5 {
        "θ ∈ (⅔(γ+1−α)/(1−α), 1) since γ+2α < 3/2".to_string()
    } else {
        "θ ∈ ((4γ+2α−1)/(2γ+α), 1) since γ+2α ≥ 3/2".to_string()
    };
    let sigma_lo = if small { 0.5 - alpha } else { 0.0 };
    let gamma_hi = if small { alpha / 2.0 } else { 0.5 - alpha / 2.0 };
    let delta_lo = 1.0 / (2.0 * gamma + alpha);

    let (src, alpha_row, gamma_row, series_row) = match (model.family, model.law) {
        (Family::DampedWave, EigenLaw::DirichletLattice { m: 1, p: 1.0 }) => {
            let src = format!("damped wave on (0,π), case {case}");
            let a = if small {
                interval("alpha", alpha, End::Open(0.25), End::Closed(0.5), format!("{src}: α ∈ (¼, ½]"))
            } else {
                interval("alpha", alpha, End::Closed(0.5), End::Open(1.0), format!("{src}: α ∈ [½, 1)"))
            };
            let glo = (0.25 - alpha / 2.0).max(0.0);
            let g = interval(
                "gamma",
                gamma,
                if 0.25 - alpha / 2.0 >= 0.0 { End::Open(glo) } else { End::Closed(0.0) },
                End::Open(gamma_hi),
                format!("{src}: γ ∈ (¼−α/2, {}) ∩ [0, ∞), here ({:.6}, {gamma_hi:.6})", if small { "α/2" } else { "½−α/2" }, 0.25 - alpha / 2.0),
            );
            (src, a, g, None)
        }
        (Family::Beam, EigenLaw::DirichletLattice { m, p: 2.0 }) => {
            let md = m as f64;
            let src = format!("damped beam on (0,π)^{m}, case {case}");
            let a = if small {
                interval("alpha", alpha, End::Open(md / 8.0), End::Closed(0.5), format!("{src}: α ∈ (m/8, ½]"))
            } else {
                interval("alpha", alpha, End::Closed(0.5), End::Open(1.0), format!("{src}: α ∈ [½, 1)"))
            };
            let raw_lo = md / 8.0 - alpha / 2.0;
            let g = interval(
                "gamma",
                gamma,
                if raw_lo >= 0.0 { End::Open(raw_lo) } else { End::Closed(0.0) },
                End::Open(gamma_hi),
                format!("{src}: γ ∈ (m/8−α/2, {}) ∩ [0, ∞), here ({raw_lo:.6}, {gamma_hi:.6})", if small { "α/2" } else { "½−α/2" }),
            );
            let series = (m == 3).then(|| {
                let p = (4.0 * alpha + 8.0 * sigma) / 3.0;
                interval("series", p, End::Open(1.0), End::None, format!("{src}: Σ μ_n^(−α−2σ) < ∞, exponent (4α+8σ)/3 = {p:.6} > 1"))
            });
            (src, a, g, series)
        }
        _ => {
            let src = format!("damped equation with eigenvalue growth n^δ, case {case}");
            let a = if small {
                interval("alpha", alpha, End::Open(0.0), End::Closed(0.5), format!("{src}: α ∈ (0, ½]"))
            } else {
                interval("alpha", alpha, End::Closed(0.5), End::Open(1.0), format!("{src}: α ∈ [½, 1)"))
            };
            let g = interval("gamma", gamma, End::Closed(0.0), End::Open(gamma_hi), format!("{src}: γ ∈ [0, {gamma_hi:.6})"));
            let p = (alpha + 2.0 * sigma) * delta;
            let series = Some(interval("series", p, End::Open(1.0), End::None, format!("{src}: Σ μ_n^(−α−2σ) < ∞, exponent (α+2σ)δ = {p:.6} > 1")));
            (src, a, g, series)
        }
    };
    let mut conditions = vec![
        alpha_row,
        gamma_row,
        interval("theta", theta, End::Open(theta_lo), End::Open(1.0), format!("{src}: {theta_text}, here lower end {theta_lo:.6}")),
        interval("sigma", sigma, End::Open(sigma_lo), End::None, format!("{src}: σ > {sigma_lo:.6}")),
        interval("delta", delta, End::Open(delta_lo), End::None, format!("{src}: δ > 1/(2γ+α) = {delta_lo:.6}")),
    ];
    conditions.extend(series_row);
    conditions.push(resonance_row(model, &src));
    Ok(AdmissibilityReport { target: src, conditions })
}

fn damped_xi(model: &SpectralModel) -> Result<AdmissibilityReport> {
    let (alpha, xi, theta) = (model.alpha, model.xi, model.theta);
    let (_, delta) = model.law.tail_law();
    let small = alpha <= 0.5;
    let case = if small { "(i)" } else { "(ii)" };
    let src = format!("damped wave with σ = γ = ξ, case {case}");
    let (alpha_row, xi_row, theta_lo) = if small {
        (
            interval("alpha", alpha, End::Open(1.0 / 3.0), End::Closed(0.5), format!("{src}: α ∈ (⅓, ½]")),
            interval("xi", xi, End::Open(0.5 - alpha), End::Open(alpha / 2.0), format!("{src}: ξ ∈ (½−α, α/2)")),
            2.0 / 3.0 * (xi + alpha) / alpha,
        )
    } else {
        (
            interval("alpha", alpha, End::Closed(0.5), End::Open(1.0), format!("{src}: α ∈ [½, 1)")),
            interval("xi", xi, End::Open(0.0), End::Open(0.5 - alpha / 2.0), format!("{src}: ξ ∈ (0, ½−α/2)")),
            theta_lower_sectorial(xi, alpha),
        )
    };
    let delta_lo = 1.0 / (2.0 * xi + alpha);
    let p = (alpha + 2.0 * xi) * delta;
    let conditions = vec![
        alpha_row,
        xi_row,
        interval("theta", theta, End::Open(theta_lo), End::Open(1.0), format!("{src}: θ lower end {theta_lo:.6}")),
        interval("delta", delta, End::Open(delta_lo), End::None, format!("{src}: δ > 1/(2ξ+α) = {delta_lo:.6}")),
        interval("series", p, End::Open(1.0), End::None, format!("{src}: Σ μ_n^(−α−2ξ) < ∞, exponent (α+2ξ)δ = {p:.6} > 1")),
        resonance_row(model, &src),
    ];
    Ok(AdmissibilityReport { target: src, conditions })
}
