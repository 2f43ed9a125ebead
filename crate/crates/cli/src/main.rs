//! `spde-uniq <subcommand> --config <path> [--seed N] [--out DIR] [--plots]`
//!
//! Exit codes: 0 when every check passes, 2 when a check fails, 3 for
//! configuration errors.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::CliError;
use config::{Config, Value};
use output::Out;

#[derive(Parser)]
#[command(name = "spde-uniq", version, about = "Spectral-Galerkin experiments for semilinear stochastic evolution equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Flat `section.key = value` file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides `run.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write SVG plots next to the CSV tables.
    #[arg(long)]
    plots: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Admissibility conditions, series, trace and Gamma reports.
    Hypcheck(Common),
    /// Ensemble second moments against Q_t.
    Simulate(Common),
    /// Common-noise coupling of two initial states.
    Lipschitz(Common),
    /// Galerkin truncations against a reference truncation.
    Convergence(Common),
    /// Null-control energies and exponent fits.
    Control(Common),
    /// Picard solution of the backward Kolmogorov equation on one block.
    Kolmogorov(Common),
    /// Residuals of the two solutions of the non-uniqueness example.
    Counterexample(Common),
    /// Fast internal consistency suite.
    Selftest(Common),
}

fn load(common: &Common, needs_config: bool) -> Result<Config, CliError> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            Config::parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        }
        None if needs_config => return Err(CliError::Config("--config is required".into())),
        None => Config::default(),
    };
    if let Some(seed) = common.seed {
        cfg.set("run.seed", Value::Int(seed));
    }
    if let Some(dir) = &common.out {
        cfg.set("output.dir", Value::Text(dir.display().to_string()));
    }
    Ok(cfg)
}

fn execute(name: &str, common: &Common, run: fn(&Config, &Out) -> Result<Vec<commands::Check>, CliError>) -> Result<bool, CliError> {
    let cfg = load(common, name != "selftest")?;
    let out = Out::new(PathBuf::from(cfg.text("output.dir").unwrap_or("out")), common.plots)?;
    out.text("metadata.txt", &format!("# spde-uniq {name}, version {}\n{}", env!("CARGO_PKG_VERSION"), cfg.echo()))?;
    let checks = run(&cfg, &out)?;
    for c in &checks {
        println!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    println!("output written to {}", out.dir.display());
    Ok(checks.iter().all(|c| c.pass))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(3);
        }
    };
    let result = match &cli.command {
        Command::Hypcheck(c) => execute("hypcheck", c, commands::hypcheck),
        Command::Simulate(c) => execute("simulate", c, commands::simulate),
        Command::Lipschitz(c) => execute("lipschitz", c, commands::lipschitz),
        Command::Convergence(c) => execute("convergence", c, commands::convergence),
        Command::Control(c) => execute("control", c, commands::control),
        Command::Kolmogorov(c) => execute("kolmogorov", c, commands::kolmogorov),
        Command::Counterexample(c) => execute("counterexample", c, commands::counterexample),
        Command::Selftest(c) => execute("selftest", c, commands::selftest),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(CliError::Failed(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Config(msg)) => {
            eprintln!("configuration error: {msg}");
            ExitCode::from(3)
        }
    }
}
