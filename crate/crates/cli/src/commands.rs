use std::io;

use spde_uniq::control::{build_control, energy_exponent, energy_scaling, integrate_controlled, ControlProblem, EnergyVariant};
use spde_uniq::engine::{couple_and_measure, galerkin_convergence, second_moments, simulate_ensemble, v_hilbert_schmidt, RunConfig};
use spde_uniq::linalg::Vec2;
use spde_uniq::models::{
    check_theorem_conditions, gamma_integrability, series_condition, trace_integrability, DriftSpec, OperatorFactorization, Profile, SpectralModel,
};
use spde_uniq::spectral::{damped_block, heat_block, q_block, semigroup_phys, EPS_RES};
use spde_uniq::verify::{check_transformed_representation, counterexample_residual, heat_fd_oracle, solve_kolmogorov_picard, KolmogorovGrid};
use spde_uniq::{quad, Error};

use crate::config::Config;
use crate::output::{e, Out, Series};

pub enum CliError {
    /// Exit code 3.
    Config(String),
    /// Exit code 2.
    Failed(String),
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        match err {
            Error::InvalidParameter(_) | Error::UnsupportedFamily(_) | Error::ResonantEigenvalue { .. } => CliError::Config(err.to_string()),
            other => CliError::Failed(other.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(err: io::Error) -> Self {
        CliError::Config(format!("cannot write output: {err}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(err: csv::Error) -> Self {
        CliError::Config(format!("cannot write output: {err}"))
    }
}

pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn check(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Check {
    Check { name: name.into(), pass, detail: detail.into() }
}

type Outcome = Result<Vec<Check>, CliError>;

fn model_and_drift(cfg: &Config) -> Result<(SpectralModel, DriftSpec), CliError> {
    let model = cfg.model().map_err(CliError::Config)?;
    let drift = cfg.drift(&model).map_err(CliError::Config)?;
    Ok((model, drift))
}

fn run_config(cfg: &Config, steps: usize, trajectories: usize) -> RunConfig {
    RunConfig::new(cfg.f("run.t_end", 1.0), cfg.u("run.steps", steps), cfg.u("run.trajectories", trajectories), cfg.seed()).with_refine(cfg.u("run.refine", 1))
}

fn spread(v: &[f64]) -> f64 {
    v.iter().copied().fold(0.0, f64::max) / v.iter().copied().fold(f64::INFINITY, f64::min)
}

pub fn hypcheck(cfg: &Config, out: &Out) -> Outcome {
    let (model, drift) = model_and_drift(cfg)?;
    let report = check_theorem_conditions(&model)?;
    let rows: Vec<Vec<String>> = report.conditions.iter().map(|c| vec![c.name.clone(), c.satisfied.to_string(), e(c.margin), c.citation.clone()]).collect();
    out.table("admissibility", &["condition", "satisfied", "margin", "citation"], &rows)?;
    let mut checks: Vec<Check> =
        report.conditions.iter().map(|c| check(format!("condition {}", c.name), c.satisfied, format!("{} (margin {:.4})", c.citation, c.margin))).collect();

    let series = series_condition(&model, &drift, model.n_max)?;
    out.table(
        "series",
        &["partial_sum", "tail_bound", "exponent", "converges"],
        &[vec![e(series.partial_sum), e(series.tail_bound), e(series.exponent), series.converges.to_string()]],
    )?;

    let etas = cfg.floats("hypcheck.eta_grid", &[0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]);
    let t = cfg.f("hypcheck.t", 1.0);
    let trace = trace_integrability(&model, &etas, t)?;
    let rows: Vec<Vec<String>> = trace
        .rows
        .iter()
        .map(|r| vec![e(r.eta), e(r.partial), e(r.tail), e(r.total), e(r.total_doubled), e(r.decay), r.stable.to_string(), r.passes.to_string()])
        .collect();
    out.table("trace", &["eta", "partial", "tail", "total", "total_doubled", "decay", "stable", "passes"], &rows)?;
    checks.push(check("trace integrability", trace.best_eta.is_some(), format!("largest passing eta {:?}", trace.best_eta)));

    let theta = model.theta;
    let gamma = gamma_integrability(&model, t, theta, cfg.f("hypcheck.theta_prime", 0.5 * theta), cfg.u("hypcheck.levels", 16))?;
    let rows: Vec<Vec<String>> = gamma.s_grid.iter().zip(&gamma.gamma_norm).zip(&gamma.gamma_g_norm).map(|((s, a), g)| vec![e(*s), e(*a), e(*g)]).collect();
    out.table("gamma", &["s", "gamma_norm", "gamma_g_norm"], &rows)?;
    checks.push(check(
        "Gamma blow-up integrability",
        gamma.super_finite,
        format!("exponent {:.4} (needs > -1), fitted |Gamma_s| slope {:.4}", gamma.super_exponent, gamma.fit_gamma.slope),
    ));
    checks.push(check("theta' integrability", gamma.theta_prime_finite, format!("exponent {:.4} (needs > -1)", gamma.theta_prime_exponent)));
    let pts = |v: &[f64]| gamma.s_grid.iter().copied().zip(v.iter().copied()).collect::<Vec<_>>();
    out.plot(
        "gamma",
        "Gamma_s blow-up",
        ("s", "norm"),
        &[("|Gamma_s|".into(), pts(&gamma.gamma_norm)), ("|Gamma_s G~|".into(), pts(&gamma.gamma_g_norm))],
        true,
    )?;
    Ok(checks)
}

pub fn simulate(cfg: &Config, out: &Out) -> Outcome {
    let (model, drift) = model_and_drift(cfg)?;
    let run = run_config(cfg, 20, 10_000);
    let x0 = cfg.initial(model.n_max);
    let table = second_moments(&model, &drift, &x0, &run)?;
    let blocks = model.blocks()?;
    let k = cfg.f("tolerance.moments_se", 3.0);
    let reference = drift.is_zero() && x0.iter().all(|v| v.norm() == 0.0);
    let mut rows = Vec::new();
    let mut inside = 0;
    let mut norms = vec![0.0; run.steps];
    for (idx, c) in table.cells.iter().enumerate() {
        let b = &blocks[c.block - 1];
        let q = q_block(b, c.time, 1e-12)?;
        let within = (0..b.dim).all(|i| (0..b.dim).all(|j| (c.second[(i, j)] - q[(i, j)]).abs() <= k * c.se[(i, j)]));
        inside += within as usize;
        norms[idx % run.steps] += c.second.trace();
        rows.push(vec![
            c.block.to_string(),
            e(c.time),
            e(c.second[(0, 0)]),
            e(c.second[(0, 1)]),
            e(c.second[(1, 1)]),
            e(c.se[(0, 0)]),
            e(c.se[(0, 1)]),
            e(c.se[(1, 1)]),
            e(q[(0, 0)]),
            e(q[(0, 1)]),
            e(q[(1, 1)]),
            within.to_string(),
        ]);
    }
    out.table("moments", &["block", "time", "m00", "m01", "m11", "se00", "se01", "se11", "q00", "q01", "q11", "within"], &rows)?;
    let times: Vec<f64> = (1..=run.steps).map(|k| k as f64 * run.h()).collect();
    out.table("norms", &["time", "mean_norm_sq"], &times.iter().zip(&norms).map(|(t, n)| vec![e(*t), e(*n)]).collect::<Vec<_>>())?;
    out.plot("norms", "E|X(t)|^2", ("t", "E|X|^2"), &[("ensemble".into(), times.iter().copied().zip(norms.iter().copied()).collect())], false)?;
    let frac = inside as f64 / table.cells.len() as f64;
    let mut checks = vec![check("ensemble", true, format!("{} trajectories, {} cells", table.trajectories, table.cells.len()))];
    if reference {
        let need = cfg.f("tolerance.moments_fraction", 0.95);
        checks.push(check(
            "convolution law",
            frac >= need,
            format!("{:.1}% of cells within {k} standard errors of Q_t (need {:.0}%)", 100.0 * frac, 100.0 * need),
        ));
    }
    Ok(checks)
}

pub fn lipschitz(cfg: &Config, out: &Out) -> Outcome {
    let (base, drift) = model_and_drift(cfg)?;
    let run = run_config(cfg, 100, 200);
    let factor = cfg.f("tolerance.lipschitz_factor", 3.0);
    let (mut rows, mut deltas, mut series) = (Vec::new(), Vec::new(), Vec::<Series>::new());
    let (mut sup_r, mut end_r, mut strong_r) = (Vec::new(), Vec::new(), Vec::new());
    for n in cfg.ints("lipschitz.n_list", &[32, 64, 128]) {
        let model = base.clone().with_n_max(n);
        let x1 = cfg.initial(n);
        let d: Vec<Vec2> = (1..=n).map(|k| Vec2::new(1.0, -0.5) / k as f64).collect();
        let dn = d.iter().map(|v| v.norm_squared()).sum::<f64>().sqrt();
        for scale in cfg.floats("lipschitz.scales", &[1e-2, 1e-1, 1.0]) {
            let x2: Vec<Vec2> = x1.iter().zip(&d).map(|(a, b)| a + b * (scale / dn)).collect();
            let diag = couple_and_measure(&model, &drift, &x1, &x2, &run)?;
            let terminal = diag.delta.last().map_or(0.0, |d| d.0) / diag.initial_gap;
            sup_r.push(diag.lipschitz_ratio);
            end_r.push(terminal);
            if let Some(r) = diag.sup_inside_ratio {
                strong_r.push(r);
            }
            let opt = |v: Option<f64>| v.map_or_else(String::new, e);
            rows.push(vec![
                n.to_string(),
                e(scale),
                e(diag.initial_gap),
                e(diag.sup_delta),
                e(diag.lipschitz_ratio),
                e(terminal),
                opt(diag.sup_inside.map(|s| s.0)),
                opt(diag.sup_inside_ratio),
            ]);
            for (t, (m, se)) in diag.times.iter().zip(&diag.delta) {
                deltas.push(vec![n.to_string(), e(scale), e(*t), e(*m), e(*se)]);
            }
            series.push((format!("n={n} |dx|={scale}"), diag.times.iter().copied().zip(diag.delta.iter().map(|d| d.0 / diag.initial_gap)).collect()));
        }
    }
    out.table("lipschitz", &["n", "scale", "initial_gap", "sup_delta", "ratio", "terminal_ratio", "sup_inside", "sup_inside_ratio"], &rows)?;
    out.table("delta", &["n", "scale", "time", "delta", "se"], &deltas)?;
    out.plot("delta", "E|X1 - X2|^2 / |x1 - x2|^2", ("t", "ratio"), &series, false)?;
    let mut checks = vec![
        check("sup_t ratio spread", spread(&sup_r) <= factor, format!("max/min {:.3} (limit {factor})", spread(&sup_r))),
        check("terminal ratio spread", spread(&end_r) <= factor, format!("max/min {:.3} (limit {factor})", spread(&end_r))),
    ];
    if v_hilbert_schmidt(&base) {
        checks.push(check("E sup_t ratio spread", spread(&strong_r) <= factor, format!("max/min {:.3} (limit {factor})", spread(&strong_r))));
    }
    Ok(checks)
}

pub fn convergence(cfg: &Config, out: &Out) -> Outcome {
    let (model, drift) = model_and_drift(cfg)?;
    let n_ref = cfg.u("convergence.n_ref", 256);
    let model = model.with_n_max(n_ref);
    let n_list = cfg.ints("convergence.n_list", &[8, 16, 32, 64]);
    let run = run_config(cfg, 100, 200);
    let table = galerkin_convergence(&model, &drift, &cfg.initial(n_ref), &run, &n_list, n_ref)?;
    let ratios = table.ratios();
    let rows: Vec<Vec<String>> = table
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let (ms, mse) = r.mean_sup_sq.map_or((String::new(), String::new()), |v| (e(v.0), e(v.1)));
            vec![r.n.to_string(), e(r.sup_mean_sq.0), e(r.sup_mean_sq.1), ms, mse, e(r.holder_moment), if i == 0 { String::new() } else { e(ratios[i - 1]) }]
        })
        .collect();
    out.table("convergence", &["n", "sup_mean_sq", "se", "mean_sup_sq", "mean_sup_se", "holder_moment", "ratio"], &rows)?;
    out.plot(
        "convergence",
        "sup_t E|X_n - X_ref|^2",
        ("n", "error"),
        &[("error".into(), table.rows.iter().map(|r| (r.n as f64, r.sup_mean_sq.0)).collect())],
        true,
    )?;
    let limit = cfg.f("tolerance.convergence_ratio", 0.7);
    let worst = ratios.iter().copied().fold(0.0, f64::max);
    Ok(vec![check(
        "ratio per refinement",
        !ratios.is_empty() && worst < limit,
        format!("ratios {:?} (limit {limit})", ratios.iter().map(|r| (r * 1e3).round() / 1e3).collect::<Vec<_>>()),
    )])
}

pub fn control(cfg: &Config, out: &Out) -> Outcome {
    let (model, _) = model_and_drift(cfg)?;
    let t_grid = cfg.floats("control.t_grid", &[0.5, 0.25, 0.125, 0.0625]);
    let n = cfg.u("control.n", model.n_max);
    let tol = cfg.f("tolerance.control_slope", 0.15);
    let (_, gamma) = model.weights();
    let (mut energy, mut fits, mut series, mut checks) = (Vec::new(), Vec::new(), Vec::<Series>::new(), Vec::new());
    for variant in [EnergyVariant::State, EnergyVariant::GA] {
        let fit = energy_scaling(&model, n, &t_grid, variant)?;
        let want = energy_exponent(model.alpha, gamma, variant);
        let name = format!("{variant:?}").to_lowercase();
        for (t, v) in fit.abscissae.iter().zip(&fit.values) {
            energy.push(vec![name.clone(), e(*t), e(*v)]);
        }
        fits.push(vec![name.clone(), e(fit.slope), e(want), e(fit.r_squared)]);
        series.push((name.clone(), fit.abscissae.iter().copied().zip(fit.values.iter().copied()).collect()));
        checks.push(check(
            format!("{name} energy exponent"),
            (fit.slope - want).abs() <= tol,
            format!("slope {:.4} vs {want:.4} (tolerance {tol})", fit.slope),
        ));
    }
    out.table("energy", &["variant", "t", "energy"], &energy)?;
    out.table("fits", &["variant", "slope", "reference", "r_squared"], &fits)?;
    out.plot("energy", "worst-case control energy", ("t", "energy"), &series, true)?;

    let k = cfg.u("control.steer_n", 6).min(model.n_max);
    let mut h = cfg.initial(k);
    if h.iter().all(|v| v.norm() == 0.0) {
        h = (1..=k).map(|j| Vec2::new(1.0, -0.5 / j as f64)).collect();
    }
    let problem = ControlProblem::new(model.with_n_max(k), t_grid[0], h.clone())?;
    let signal = build_control(&problem)?;
    let y = integrate_controlled(&problem, |tau| signal.eval(tau), cfg.u("control.steps", 400))?;
    let norm = |v: &[Vec2]| v.iter().map(|x| x.norm_squared()).sum::<f64>().sqrt();
    let ratio = norm(&y) / norm(&h);
    let rows: Vec<Vec<String>> =
        signal.sample_times.iter().zip(&signal.samples).map(|(t, u)| std::iter::once(e(*t)).chain(u.iter().map(|v| e(*v))).collect()).collect();
    let header: Vec<String> = std::iter::once("tau".to_string()).chain((1..=k).map(|j| format!("u{j}"))).collect();
    out.table("control_signal", &header.iter().map(String::as_str).collect::<Vec<_>>(), &rows)?;
    let limit = cfg.f("tolerance.steering", 1e-8);
    checks.push(check("null steering", ratio <= limit, format!("|Y(t)|/|h| = {ratio:.2e} (limit {limit:e}), energy {:.4e}", signal.energy)));
    Ok(checks)
}

pub fn kolmogorov(cfg: &Config, out: &Out) -> Outcome {
    let (model, drift) = model_and_drift(cfg)?;
    let d = KolmogorovGrid::default();
    let grid = KolmogorovGrid {
        half_width: cfg.f("kolmogorov.half_width", d.half_width),
        nodes: cfg.u("kolmogorov.nodes", d.nodes),
        time_nodes: cfg.u("kolmogorov.time_nodes", d.time_nodes),
        hermite_order: cfg.u("kolmogorov.hermite_order", d.hermite_order),
    };
    let tol = cfg.f("tolerance.kolmogorov_residual", 1e-6);
    let x0 = cfg.initial(1)[0];
    let (mut rows, mut m_t, mut checks) = (Vec::new(), Vec::new(), Vec::new());
    for t in cfg.floats("kolmogorov.t_grid", &[0.2, 0.1, 0.05, 0.025]) {
        let sol = match solve_kolmogorov_picard(&model, &drift, t, &grid) {
            Ok(s) => s,
            Err(Error::NoContraction { ratio, iteration }) => {
                checks.push(check(format!("Picard at T = {t}"), false, format!("no contraction (ratio {ratio:.3} at iteration {iteration}); halve T")));
                continue;
            }
            Err(err) => return Err(err.into()),
        };
        let run = RunConfig::new(t, cfg.u("kolmogorov.path_steps", 2000), 1, cfg.seed());
        let deviation = match check_transformed_representation(&model, &drift, &sol, x0, &run, 0) {
            Ok(r) => e(r.max_deviation),
            Err(Error::PathLeftBox { time }) => format!("left box at {time:e}"),
            Err(err) => return Err(err.into()),
        };
        checks.push(check(
            format!("Picard at T = {t}"),
            sol.residual < tol,
            format!("{} iterations, residual {:.2e} (limit {tol:e}), M_T {:.4}", sol.iterations, sol.residual, sol.m_t),
        ));
        rows.push(vec![e(t), sol.iterations.to_string(), e(sol.residual), e(sol.sup_norm), e(sol.grad_sup_norm), e(sol.drift_norm), e(sol.m_t), deviation]);
        m_t.push((t, sol.m_t));
    }
    out.table("kolmogorov", &["T", "iterations", "residual", "sup_norm", "grad_sup_norm", "drift_norm", "m_t", "representation_deviation"], &rows)?;
    out.plot("m_t", "measured M_T", ("T", "M_T"), &[("M_T".into(), m_t.clone())], true)?;
    let decreasing = m_t.len() >= 2 && m_t.windows(2).all(|w| w[1].1 < w[0].1);
    checks.push(check("M_T decreases with T", decreasing, format!("{:?}", m_t.iter().map(|p| p.1).collect::<Vec<_>>())));
    Ok(checks)
}

pub fn counterexample(cfg: &Config, out: &Out) -> Outcome {
    let r = counterexample_residual(cfg.u("counterexample.time_points", 512), cfg.u("counterexample.intervals", 512));
    out.table(
        "residual",
        &["solution", "max_residual"],
        &[vec!["zero".into(), e(r.max_residual_zero)], vec!["tau^8 sin(2 xi)".into(), e(r.max_residual_nonzero)]],
    )?;
    let names = ["y_tautau", "-y_xixi", "fractional_damping", "c(xi,y)"];
    out.table("terms", &["term", "max_abs"], &names.iter().zip(r.term_max).map(|(n, v)| vec![n.to_string(), e(v)]).collect::<Vec<_>>())?;
    let tol = cfg.f("tolerance.counterexample_residual", 1e-10);
    Ok(vec![
        check("zero solution", r.max_residual_zero <= tol, format!("residual {:.2e}", r.max_residual_zero)),
        check("nonzero solution", r.max_residual_nonzero <= tol, format!("residual {:.2e} on {}x{} grid", r.max_residual_nonzero, r.time_points, r.intervals)),
        check(
            "identical initial data",
            r.initial_data == 0.0,
            format!("max |y(0)| + |y_tau(0)| = {:e}, max |y| = {:.3} keeps the cutoff at 1", r.initial_data, r.max_abs_y),
        ),
    ])
}

/// Fast versions of the library's checks on fixed parameters.
pub fn selftest(cfg: &Config, out: &Out) -> Outcome {
    let seed = cfg.seed();
    let mut checks = Vec::new();

    let mut vieta: f64 = 0.0;
    for (alpha, rho, mu) in (1..10).flat_map(|a| (1..5).flat_map(move |r| (1..6).map(move |k| (0.1 * a as f64, 0.5 * r as f64, 10f64.powi(k))))) {
        if let Ok(b) = damped_block(1, mu, rho, alpha, 0.1, 0.1, EPS_RES) {
            let d = rho * mu.powf(alpha);
            let (s, p) = (b.lambda_plus + b.lambda_minus, b.lambda_plus * b.lambda_minus);
            vieta = vieta.max((s.re + d).abs() / d).max((p.re - mu).abs() / mu);
        }
    }
    checks.push(check("Vieta relations", vieta <= 1e-12, format!("max relative error {vieta:.1e}")));

    let model = SpectralModel::damped_wave(0.4, 1.0, 0.1, 0.15, 0.9, 16);
    let blocks = model.blocks()?;
    let law = blocks.iter().map(|b| (semigroup_phys(b, 0.3) * semigroup_phys(b, 0.7) - semigroup_phys(b, 1.0)).amax()).fold(0.0, f64::max);
    checks.push(check("semigroup law", law <= 1e-10, format!("max entry error {law:.1e}")));
    let f = OperatorFactorization::from_blocks(&blocks);
    checks.push(check(
        "commutation",
        f.commutation_defect() <= 1e-14 && f.factorization_defect() <= 1e-14,
        format!("defects {:.1e}, {:.1e}", f.commutation_defect(), f.factorization_defect()),
    ));

    let mut q_err: f64 = 0.0;
    for k in 1..=20 {
        let b = heat_block(k, (k * k) as f64, 1.0, 0.0, 0.5);
        let a = -((k * k) as f64);
        let num = quad::adaptive_scalar(|s| (2.0 * a * s).exp() / k as f64, 0.0, 0.5, 1e-12, 1000)?;
        q_err = q_err.max((q_block(&b, 0.5, 1e-12)?[(0, 0)] - num).abs() / num);
    }
    checks.push(check("heat Q_t", q_err <= 1e-8, format!("max relative error {q_err:.1e}")));

    let r = counterexample_residual(128, 128);
    checks.push(check("counterexample", r.max_residual_nonzero <= 1e-10, format!("residual {:.1e}", r.max_residual_nonzero)));

    let one = SpectralModel::damped_wave(0.4, 1.0, 0.1, 0.15, 0.9, 1);
    let holder = DriftSpec::mode_coefficients(1.0, 0.0, Profile::HolderSign { theta: 0.9 }, 0.9);
    let g = KolmogorovGrid { nodes: 17, time_nodes: 11, hermite_order: 9, ..Default::default() };
    let sol = solve_kolmogorov_picard(&one, &holder, 0.1, &g)?;
    checks.push(check("Kolmogorov Picard", sol.residual < 1e-6, format!("{} iterations, residual {:.1e}", sol.iterations, sol.residual)));

    let heat = SpectralModel::heat(1, 1.0, 0.0, 0.3, 0.95, 32);
    let tanh = DriftSpec::mode_coefficients(1.0, 1.0, Profile::Tanh, 1.0);
    let run = RunConfig::new(0.5, 50, 50, seed);
    let conv = galerkin_convergence(&heat, &tanh, &[], &run, &[4, 8, 16], 32)?;
    let ratios = conv.ratios();
    checks.push(check("Galerkin convergence", ratios.iter().all(|&r| r < 0.7), format!("ratios {ratios:.3?}")));

    let a = simulate_ensemble(&heat, &tanh, &[], &run)?;
    let b = simulate_ensemble(&heat, &tanh, &[], &run)?;
    let same = a.trajectories.iter().flatten().zip(b.trajectories.iter().flatten()).all(|(p, q)| p.coords == q.coords);
    checks.push(check("reproducible ensembles", same, format!("seed {seed}")));

    let h: Vec<Vec2> = (1..=4).map(|k| Vec2::new(1.0, -0.5 / k as f64)).collect();
    let p = ControlProblem::new(model.with_n_max(4), 0.5, h.clone())?;
    let sig = build_control(&p)?;
    let y = integrate_controlled(&p, |tau| sig.eval(tau), 300)?;
    let ratio = (y.iter().map(|v| v.norm_squared()).sum::<f64>() / h.iter().map(|v| v.norm_squared()).sum::<f64>()).sqrt();
    checks.push(check("null steering", ratio <= 1e-8, format!("|Y(t)|/|h| = {ratio:.1e}")));

    let fd_model = SpectralModel::heat(1, 1.0, 0.5, 0.0, 0.9, 8);
    let x0: Vec<Vec2> = (1..=8).map(|k| Vec2::new(1.0 / k as f64, 0.0)).collect();
    let fd = heat_fd_oracle(&fd_model, &tanh, &x0, 0.5, &[(32, 100), (64, 400)], seed, seed)?;
    checks.push(check(
        "finite-difference oracle",
        fd[1].discrepancy < fd[0].discrepancy,
        format!("discrepancies {:.2e}, {:.2e}", fd[0].discrepancy, fd[1].discrepancy),
    ));

    let rows: Vec<Vec<String>> = checks.iter().map(|c| vec![c.name.clone(), c.pass.to_string(), c.detail.clone()]).collect();
    out.table("selftest", &["check", "pass", "detail"], &rows)?;
    Ok(checks)
}
