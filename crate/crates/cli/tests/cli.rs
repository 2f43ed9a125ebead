use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SMALL_SIM: &str = "
model.family = heat
model.gamma = 0.5
model.sigma = 0.0
model.n_max = 3
run.steps = 4
run.trajectories = 500
drift.kind = mode
drift.profile = tanh
";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spde-uniq")).args(args).output().unwrap()
}

fn run_with(sub: &str, config: &str, dir: &Path, extra: &[&str]) -> Output {
    let cfg = dir.join("input.cfg");
    fs::write(&cfg, config).unwrap();
    let out = dir.join("out");
    let mut args = vec![sub, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn counterexample_default_grid_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_with("counterexample", "", dir.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let mut rdr = csv::Reader::from_path(dir.path().join("out/residual.csv")).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["solution", "max_residual"]);
    let max = rdr.records().map(|r| r.unwrap()[1].parse::<f64>().unwrap()).fold(0.0, f64::max);
    assert!(max <= 1e-10, "{max}");
}

#[test]
fn small_theta_fails_hypcheck_and_cites_the_condition() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_with("hypcheck", "model.family = damped_wave\nmodel.alpha = 0.4\nmodel.theta = 0.5\n", dir.path(), &[]);
    assert_eq!(o.status.code(), Some(2));
    let text = stdout(&o);
    let line = text.lines().find(|l| l.starts_with("FAIL condition theta")).expect("theta line");
    assert!(line.contains("case (i)") && line.contains("θ ∈ (⅔(γ+α)/α, 1)"), "{line}");
    let table = fs::read_to_string(dir.path().join("out/admissibility.csv")).unwrap();
    assert!(table.lines().any(|l| l.starts_with("theta,false,")));
}

#[test]
fn admissible_hypcheck_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_with("hypcheck", "model.family = damped_wave\nmodel.alpha = 0.4\nmodel.theta = 0.9\n", dir.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn configuration_errors_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.cfg");
    assert_eq!(run(&["hypcheck", "--config", missing.to_str().unwrap()]).status.code(), Some(3));
    assert_eq!(run(&["hypcheck"]).status.code(), Some(3));
    assert_eq!(run(&["hypcheck", "--bogus"]).status.code(), Some(3));
    for bad in ["model.family = heat\nmodel.gamma_typo = 1\n", "model.family = plate\n", "model.family = heat\nmodel.theta = 1.5\n", "run.seed = x\n"] {
        let o = run_with("hypcheck", bad, dir.path(), &[]);
        assert_eq!(o.status.code(), Some(3), "{bad}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn metadata_echo_reparses_to_the_same_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "model.family = damped_wave\nmodel.alpha = 0.45\nmodel.gamma = 0.1\nmodel.theta = 0.95\nhypcheck.eta_grid = 0.1, 0.3\nrun.seed = 9\n";
    assert_eq!(run_with("hypcheck", cfg, dir.path(), &[]).status.code(), Some(0));
    let first = fs::read_to_string(dir.path().join("out/metadata.txt")).unwrap();
    assert!(first.contains("model.alpha = 0.45") && first.contains("run.seed = 9"));

    let again = dir.path().join("again");
    fs::create_dir(&again).unwrap();
    assert_eq!(run_with("hypcheck", &first, &again, &[]).status.code(), Some(0));
    let second = fs::read_to_string(again.join("out/metadata.txt")).unwrap();
    let body = |s: &str| s.lines().filter(|l| !l.starts_with("output.dir")).map(str::to_string).collect::<Vec<_>>();
    assert_eq!(body(&first), body(&second));
}

#[test]
fn simulate_is_reproducible_from_config_and_seed() {
    let read = |seed: &str| {
        let dir = tempfile::tempdir().unwrap();
        let o = run_with("simulate", SMALL_SIM, dir.path(), &["--seed", seed]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
        fs::read_to_string(dir.path().join("out/moments.csv")).unwrap()
    };
    let a = read("11");
    assert_eq!(a, read("11"));
    assert_ne!(a, read("12"));
}

#[test]
fn plots_are_written_only_on_request() {
    let dir = tempfile::tempdir().unwrap();
    run_with("simulate", SMALL_SIM, dir.path(), &[]);
    assert!(!dir.path().join("out/norms.svg").exists());
    run_with("simulate", SMALL_SIM, dir.path(), &["--plots"]);
    assert!(fs::read_to_string(dir.path().join("out/norms.svg")).unwrap().starts_with("<svg"));
}

#[test]
fn selftest_runs_without_a_config() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["selftest", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}
