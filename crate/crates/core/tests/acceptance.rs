//! Acceptance run: one line per criterion, non-zero exit when any fails.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spde_uniq::control::{build_control, energy_exponent, energy_scaling, integrate_controlled, ControlProblem, EnergyVariant};
use spde_uniq::engine::{couple_and_measure, galerkin_convergence, second_moments, v_hilbert_schmidt, RunConfig};
use spde_uniq::fit::{dyadic_grid, fit_exponent};
use spde_uniq::linalg::Vec2;
use spde_uniq::models::{check_theorem_conditions, gamma_integrability, trace_integrability, DriftSpec, Nemytskii, Profile, SpectralModel};
use spde_uniq::spectral::{a_eta_ltilde_norm, damped_block, heat_block, q_block, semigroup_phys, EPS_RES};
use spde_uniq::verify::{counterexample_residual, solve_kolmogorov_picard, KolmogorovGrid};
use spde_uniq::{quad, Error};

struct Outcome {
    pass: bool,
    detail: String,
}

fn ok(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn eigen_identities() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for ia in 0..10 {
        let alpha = 0.05 + 0.09 * ia as f64;
        for ir in 0..10 {
            let rho = 0.25 * 1.35f64.powi(ir);
            for k in 1..=10 {
                let mu = (k * k) as f64 * 1.7f64.powi(k as i32 - 5);
                let b = match damped_block(k, mu, rho, alpha, 0.0, 0.0, EPS_RES) {
                    Ok(b) => b,
                    Err(e) => return ok(false, format!("block (alpha {alpha}, rho {rho}, mu {mu}) failed: {e}")),
                };
                let (sum, prod) = (b.lambda_plus + b.lambda_minus, b.lambda_plus * b.lambda_minus);
                let d = rho * mu.powf(alpha);
                worst = worst.max((sum.re + d).abs() / d).max(sum.im.abs() / d).max((prod.re - mu).abs() / mu).max(prod.im.abs() / mu);
                count += 1;
            }
        }
    }
    // ρ²μ^{2α} = 4μ at μ = (4/ρ²)^{1/(2α−1)}
    let resonant = [(0.3, 0.5), (0.25, 0.8), (0.7, 3.0)].iter().all(|&(alpha, rho): &(f64, f64)| {
        let mu = (4.0 / (rho * rho)).powf(1.0 / (2.0 * alpha - 1.0));
        matches!(damped_block(1, mu, rho, alpha, 0.0, 0.0, EPS_RES), Err(Error::ResonantEigenvalue { .. }))
    });
    ok(worst <= 1e-12 && resonant && count == 1000, format!("{count} blocks, max Vieta relative error {worst:.2e}, resonant inputs rejected: {resonant}"))
}

fn semigroup_law() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let families = [
        ("heat", SpectralModel::heat(1, 1.0, 0.0, 0.2, 0.9, 20)),
        ("damped wave", SpectralModel::damped_wave(0.4, 1.0, 0.1, 0.15, 0.9, 20)),
        ("damped wave rho=4", SpectralModel::damped_wave(0.45, 4.0, 0.1, 0.15, 0.9, 20)),
        ("beam", SpectralModel::beam(1, 0.6, 1.0, 0.1, 0.2, 0.9, 20)),
        ("xi variant", SpectralModel::damped_wave_xi(0.4, 1.0, 0.1, 0.9, 20)),
    ];
    let mut worst: f64 = 0.0;
    for (name, m) in &families {
        let blocks = match m.blocks() {
            Ok(b) => b,
            Err(e) => return ok(false, format!("{name}: {e}")),
        };
        for b in &blocks {
            for _ in 0..100 {
                let (t, s) = (rng.random_range(0.0..2.0), rng.random_range(0.0..2.0));
                let d = semigroup_phys(b, t) * semigroup_phys(b, s) - semigroup_phys(b, t + s);
                worst = worst.max(d.amax());
            }
        }
    }
    ok(worst <= 1e-10, format!("{} families x 20 blocks x 100 pairs, max entry error {worst:.2e}", families.len()))
}

fn beta_exponent() -> Outcome {
    let mut lines = Vec::new();
    let mut pass = true;
    let ts = dyadic_grid(4, 12);
    for (alpha, sigma, want) in [(0.4, 0.2, 0.75), (0.3, 0.05, 1.5), (0.6, 0.3, 0.5), (0.75, 0.9, 0.0)] {
        let model = SpectralModel::beam(1, alpha, 1.3, 0.0, sigma, 0.9, 2000);
        let formula = model.beta_exponent();
        let blocks = match model.blocks() {
            Ok(b) => b,
            Err(e) => return ok(false, e.to_string()),
        };
        let samples: Vec<(f64, f64)> = ts.iter().map(|&t| (t, a_eta_ltilde_norm(&blocks, t))).collect();
        let slope = match fit_exponent(&samples) {
            Ok(f) => f.slope,
            Err(e) => return ok(false, e.to_string()),
        };
        let good = (formula - want).abs() < 1e-12 && (slope + formula).abs() <= 0.1;
        pass &= good;
        lines.push(format!("({alpha},{sigma}) slope {slope:.3} vs {:.3}", 0.0 - formula));
    }
    ok(pass, lines.join(", "))
}

fn heat_q_closed_form() -> Outcome {
    let mut worst: f64 = 0.0;
    for (beta, gamma) in [(1.0, 0.0), (0.5, 0.5), (1.5, 1.0)] {
        for k in 1..=60usize {
            let lambda = (k * k) as f64;
            let b = heat_block(k, lambda, beta, 0.0, gamma);
            for t in [1e-3, 0.05, 0.5, 2.0] {
                let closed = 0.5 * lambda.powf(-(beta + gamma)) * (1.0 - (-2.0 * t * lambda.powf(beta)).exp());
                let a = -lambda.powf(beta);
                let g2 = lambda.powf(-gamma);
                let quad = match quad::adaptive_scalar(|s| g2 * (2.0 * a * s).exp(), 0.0, t, 1e-12, 10_000) {
                    Ok(v) => v,
                    Err(e) => return ok(false, e.to_string()),
                };
                let stored = q_block(&b, t, 1e-12).map(|q| q[(0, 0)]).unwrap_or(f64::NAN);
                worst = worst.max((quad - closed).abs() / closed).max((stored - closed).abs() / closed);
            }
        }
    }
    ok(worst <= 1e-8, format!("180 modes x 4 times, max relative error {worst:.2e}"))
}

fn null_control() -> Outcome {
    let mut worst_ratio: f64 = 0.0;
    let mut cases = 0;
    for &alpha in &[0.3, 0.4, 0.45, 0.5] {
        for (j, &(gamma, t)) in [(0.0, 0.5), (0.1, 0.25), (0.2, 1.0), (0.45, 0.5), (0.6, 0.75)].iter().enumerate() {
            let model = SpectralModel::damped_wave(alpha, 1.0, gamma, 0.15, 0.9, 6);
            let h: Vec<Vec2> = (0..6).map(|k| Vec2::new(((k + j) as f64).cos(), 0.5 - 0.1 * k as f64)).collect();
            let run = || -> Result<f64, Error> {
                let p = ControlProblem::new(model.clone(), t, h.clone())?;
                let sig = build_control(&p)?;
                let y = integrate_controlled(&p, |tau| sig.eval(tau), 400)?;
                let hn = h.iter().map(|v| v.norm_squared()).sum::<f64>().sqrt();
                Ok(y.iter().map(|v| v.norm_squared()).sum::<f64>().sqrt() / hn)
            };
            match run() {
                Ok(r) => worst_ratio = worst_ratio.max(r),
                Err(e) => return ok(false, format!("(alpha {alpha}, gamma {gamma}, t {t}): {e}")),
            }
            cases += 1;
        }
    }
    let mut pass = worst_ratio <= 1e-8 && cases == 20;
    let mut fits = Vec::new();
    let ts = dyadic_grid(1, 4);
    for (alpha, gamma, variant) in
        [(0.4, 0.1, EnergyVariant::State), (0.4, 0.1, EnergyVariant::GA), (0.3, 0.45, EnergyVariant::State), (0.3, 0.45, EnergyVariant::GA)]
    {
        let model = SpectralModel::damped_wave(alpha, 1.0, gamma, 0.15, 0.9, 2000);
        let want = energy_exponent(alpha, gamma, variant);
        match energy_scaling(&model, 2000, &ts, variant) {
            Ok(f) => {
                pass &= (f.slope - want).abs() <= 0.15;
                fits.push(format!("({alpha},{gamma},{variant:?}) {:.3} vs {want:.3}", f.slope));
            }
            Err(e) => return ok(false, e.to_string()),
        }
    }
    ok(pass, format!("{cases} cases, max |Y(t)|/|h| {worst_ratio:.1e}; energy slopes {}", fits.join(", ")))
}

fn convolution_law() -> Outcome {
    let mut total = 0;
    let mut inside = 0;
    for (model, steps) in [(SpectralModel::damped_wave(0.4, 1.0, 0.1, 0.15, 0.9, 4), 8), (SpectralModel::heat(1, 1.0, 0.5, 0.0, 0.9, 4), 8)] {
        let run = RunConfig::new(1.0, steps, 100_000, 17);
        let table = match second_moments(&model, &DriftSpec::zero(), &[], &run) {
            Ok(t) => t,
            Err(e) => return ok(false, e.to_string()),
        };
        let blocks = model.blocks().unwrap();
        for cell in &table.cells {
            let q = q_block(&blocks[cell.block - 1], cell.time, 1e-12).unwrap();
            let dim = blocks[cell.block - 1].dim;
            let good = (0..dim).all(|a| (0..dim).all(|b| (cell.second[(a, b)] - q[(a, b)]).abs() <= 3.0 * cell.se[(a, b)]));
            total += 1;
            inside += good as usize;
        }
    }
    let frac = inside as f64 / total as f64;
    ok(frac >= 0.95, format!("{inside}/{total} (block, time) cells within 3 standard errors ({:.1}%)", 100.0 * frac))
}

fn holder_sine_drift(theta: f64) -> DriftSpec {
    let c1 = 2.0 * 2f64.powf(1.0 - theta);
    DriftSpec::nemytskii(Nemytskii::new(move |xi, y, _| 2.0 * xi.sin() * y.signum() * y.abs().min(1.0).powf(theta), c1, 2.0, 512), theta)
}

fn galerkin() -> Outcome {
    let n_list = [8, 16, 32, 64];
    let mut pass = true;
    let mut lines = Vec::new();
    for (name, model) in [("damped", SpectralModel::damped_wave(0.5, 1.0, 0.2, 0.1, 0.95, 256)), ("heat", SpectralModel::heat(1, 1.0, 0.0, 0.3, 0.95, 256))] {
        let admissible = check_theorem_conditions(&model).map(|r| r.all_pass()).unwrap_or(false);
        let drift = holder_sine_drift(0.95);
        let x0: Vec<Vec2> = (1..=256).map(|k| Vec2::new(1.0 / k as f64, if model.is_damped() { 0.5 / k as f64 } else { 0.0 })).collect();
        let run = RunConfig::new(1.0, 100, 200, 23);
        let table = match galerkin_convergence(&model, &drift, &x0, &run, &n_list, 256) {
            Ok(t) => t,
            Err(e) => return ok(false, e.to_string()),
        };
        let ratios = table.ratios();
        pass &= admissible && ratios.iter().all(|&r| r < 0.7);
        lines.push(format!("{name} (admissible {admissible}) ratios {}", ratios.iter().map(|r| format!("{r:.3}")).collect::<Vec<_>>().join("/")));
    }
    ok(pass, lines.join("; "))
}

fn spread(v: &[f64]) -> f64 {
    v.iter().copied().fold(0.0, f64::max) / v.iter().copied().fold(f64::INFINITY, f64::min)
}

fn lipschitz() -> Outcome {
    let direction = |n: usize| -> Vec<Vec2> {
        let d: Vec<Vec2> = (1..=n).map(|k| Vec2::new(1.0 / k as f64, -0.5 / k as f64)).collect();
        let norm = d.iter().map(|v| v.norm_squared()).sum::<f64>().sqrt();
        d.into_iter().map(|v| v / norm).collect()
    };
    let mut pass = true;
    let mut lines = Vec::new();
    let configs = [
        ("damped wave", SpectralModel::damped_wave(0.4, 1.0, 0.1, 0.15, 0.9, 128), false),
        ("beam", SpectralModel::beam(1, 0.45, 1.0, 0.15, 0.1, 0.95, 128), true),
    ];
    for (name, base, strong) in configs {
        let admissible = check_theorem_conditions(&base).map(|r| r.all_pass()).unwrap_or(false);
        let hs = v_hilbert_schmidt(&base);
        let drift = DriftSpec::mode_coefficients(1.0, 1.0, Profile::HolderSign { theta: base.theta }, base.theta);
        let (mut sup_ratios, mut end_ratios, mut strong_ratios) = (Vec::new(), Vec::new(), Vec::new());
        for n in [32, 64, 128] {
            let model = base.clone().with_n_max(n);
            let d = direction(n);
            let x1: Vec<Vec2> = (1..=n).map(|k| Vec2::new(0.5 / k as f64, 0.0)).collect();
            for scale in [1e-2, 1e-1, 1.0] {
                let x2: Vec<Vec2> = x1.iter().zip(&d).map(|(a, b)| a + b * scale).collect();
                let run = RunConfig::new(1.0, 100, 200, 29);
                let diag = match couple_and_measure(&model, &drift, &x1, &x2, &run) {
                    Ok(v) => v,
                    Err(e) => return ok(false, e.to_string()),
                };
                sup_ratios.push(diag.lipschitz_ratio);
                end_ratios.push(diag.delta.last().unwrap().0 / diag.initial_gap);
                if let Some(r) = diag.sup_inside_ratio {
                    strong_ratios.push(r);
                }
            }
        }
        let mut good = admissible && spread(&sup_ratios) <= 3.0 && spread(&end_ratios) <= 3.0;
        let mut line = format!("{name} (admissible {admissible}): sup_t spread {:.3}, terminal spread {:.3}", spread(&sup_ratios), spread(&end_ratios));
        if strong {
            good &= hs && strong_ratios.len() == 9 && spread(&strong_ratios) <= 3.0;
            line += &format!(", HS {hs}, E sup_t spread {:.3}", if strong_ratios.is_empty() { f64::NAN } else { spread(&strong_ratios) });
        }
        pass &= good;
        lines.push(line);
    }
    ok(pass, lines.join("; "))
}

fn kolmogorov() -> Outcome {
    let model = SpectralModel::damped_wave(0.4, 1.0, 0.1, 0.15, 0.9, 1);
    let drift = DriftSpec::mode_coefficients(1.0, 0.0, Profile::HolderSign { theta: 0.9 }, 0.9);
    let mut m_t = Vec::new();
    let mut worst_residual: f64 = 0.0;
    for t in [0.2, 0.1, 0.05, 0.025] {
        match solve_kolmogorov_picard(&model, &drift, t, &KolmogorovGrid::default()) {
            Ok(s) => {
                worst_residual = worst_residual.max(s.residual);
                m_t.push(s.m_t);
            }
            Err(e) => return ok(false, format!("T = {t}: {e}")),
        }
    }
    let decreasing = m_t.windows(2).all(|w| w[1] < w[0]);
    ok(
        worst_residual < 1e-6 && decreasing,
        format!(
            "converged for T = 0.2..0.025, max residual {worst_residual:.1e}, M_T {}",
            m_t.iter().map(|m| format!("{m:.4}")).collect::<Vec<_>>().join(" > ")
        ),
    )
}

fn counterexample() -> Outcome {
    let r = counterexample_residual(512, 512);
    ok(
        r.max_residual_zero <= 1e-10 && r.max_residual_nonzero <= 1e-10 && r.initial_data == 0.0,
        format!("512x512 grid, residuals {:.1e} (y = 0) and {:.1e} (y = tau^8 sin 2xi), zero initial data", r.max_residual_zero, r.max_residual_nonzero),
    )
}

fn hypothesis_checkers() -> Outcome {
    let model = SpectralModel::heat(1, 1.0, 0.0, 0.0, 0.9, 2000);
    let gamma = match gamma_integrability(&model, 1.0, 0.9, 0.5, 12) {
        Ok(g) => g.fit_gamma.slope,
        Err(e) => return ok(false, e.to_string()),
    };
    let etas = [0.1, 0.2, 0.3, 0.4, 0.45, 0.5, 0.55, 0.6, 0.8];
    let trace = match trace_integrability(&model.clone().with_n_max(500), &etas, 1.0) {
        Ok(t) => t,
        Err(e) => return ok(false, e.to_string()),
    };
    let split = trace.rows.iter().all(|r| r.passes == (r.eta < 0.5));
    let passing: Vec<f64> = trace.rows.iter().filter(|r| r.passes).map(|r| r.eta).collect();
    ok((gamma + 0.5).abs() <= 0.05 && split, format!("Gamma blow-up slope {gamma:.4}, trace integrability passes for eta in {passing:?}"))
}

type Criterion = (&'static str, u64, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 11] = [
        ("eigen-identities", 1, eigen_identities),
        ("semigroup law", 1, semigroup_law),
        ("beta exponent of |A e^{tA} L~|", 10, beta_exponent),
        ("heat Q_t closed form", 1, heat_q_closed_form),
        ("null control", 30, null_control),
        ("stochastic convolution law", 60, convolution_law),
        ("Galerkin convergence", 300, galerkin),
        ("Lipschitz estimate", 300, lipschitz),
        ("Kolmogorov fixed point", 120, kolmogorov),
        ("counterexample", 5, counterexample),
        ("hypothesis checkers", 10, hypothesis_checkers),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = f();
        let took = start.elapsed();
        let pass = out.pass && took <= Duration::from_secs(*limit);
        failed += !pass as usize;
        println!("[{}] {:>2} {name}: {} ({:.2} s, limit {limit} s)", if pass { "PASS" } else { "FAIL" }, i + 1, out.detail, took.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
