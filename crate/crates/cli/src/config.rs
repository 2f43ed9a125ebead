//! Flat `section.key = value` configuration with a fixed key table.

use std::collections::BTreeMap;
use std::fmt;

use spde_uniq::linalg::Vec2;
use spde_uniq::models::{DriftSpec, EigenLaw, Family, Nemytskii, Profile, SpectralModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Float,
    Int,
    Text,
    Floats,
    Ints,
}

const KEYS: &[(&str, Kind)] = &[
    ("model.family", Kind::Text),
    ("model.alpha", Kind::Float),
    ("model.beta", Kind::Float),
    ("model.rho", Kind::Float),
    ("model.gamma", Kind::Float),
    ("model.sigma", Kind::Float),
    ("model.theta", Kind::Float),
    ("model.xi", Kind::Float),
    ("model.m", Kind::Int),
    ("model.n_max", Kind::Int),
    ("model.law", Kind::Text),
    ("model.law_c", Kind::Float),
    ("model.law_delta", Kind::Float),
    ("model.noise_amp", Kind::Float),
    ("run.t_end", Kind::Float),
    ("run.steps", Kind::Int),
    ("run.trajectories", Kind::Int),
    ("run.seed", Kind::Int),
    ("run.refine", Kind::Int),
    ("drift.kind", Kind::Text),
    ("drift.amplitude", Kind::Float),
    ("drift.decay", Kind::Float),
    ("drift.profile", Kind::Text),
    ("drift.theta", Kind::Float),
    ("drift.grid", Kind::Int),
    ("initial.amplitude", Kind::Float),
    ("initial.decay", Kind::Float),
    ("initial.velocity", Kind::Float),
    ("hypcheck.t", Kind::Float),
    ("hypcheck.eta_grid", Kind::Floats),
    ("hypcheck.theta_prime", Kind::Float),
    ("hypcheck.levels", Kind::Int),
    ("lipschitz.scales", Kind::Floats),
    ("lipschitz.n_list", Kind::Ints),
    ("convergence.n_list", Kind::Ints),
    ("convergence.n_ref", Kind::Int),
    ("control.t_grid", Kind::Floats),
    ("control.n", Kind::Int),
    ("control.steer_n", Kind::Int),
    ("control.steps", Kind::Int),
    ("kolmogorov.t_grid", Kind::Floats),
    ("kolmogorov.half_width", Kind::Float),
    ("kolmogorov.nodes", Kind::Int),
    ("kolmogorov.time_nodes", Kind::Int),
    ("kolmogorov.hermite_order", Kind::Int),
    ("kolmogorov.path_steps", Kind::Int),
    ("counterexample.time_points", Kind::Int),
    ("counterexample.intervals", Kind::Int),
    ("tolerance.moments_se", Kind::Float),
    ("tolerance.moments_fraction", Kind::Float),
    ("tolerance.lipschitz_factor", Kind::Float),
    ("tolerance.convergence_ratio", Kind::Float),
    ("tolerance.control_slope", Kind::Float),
    ("tolerance.steering", Kind::Float),
    ("tolerance.kolmogorov_residual", Kind::Float),
    ("tolerance.counterexample_residual", Kind::Float),
    ("output.dir", Kind::Text),
];

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Float(f64),
    Int(u64),
    Text(String),
    Floats(Vec<f64>),
    Ints(Vec<u64>),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: Vec<String>| v.join(", ");
        match self {
            Value::Float(x) => write!(f, "{x:?}"),
            Value::Int(x) => write!(f, "{x}"),
            Value::Text(s) => write!(f, "{s}"),
            Value::Floats(v) => write!(f, "{}", join(v.iter().map(|x| format!("{x:?}")).collect())),
            Value::Ints(v) => write!(f, "{}", join(v.iter().map(|x| x.to_string()).collect())),
        }
    }
}

fn list(s: &str) -> Vec<&str> {
    s.split(',').map(str::trim).filter(|p| !p.is_empty()).collect()
}

fn parse_value(kind: Kind, raw: &str) -> Result<Value, String> {
    let float = |s: &str| {
        s.trim().parse::<f64>().map_err(|_| format!("expected a number, got {s:?}")).and_then(|x| {
            if x.is_finite() {
                Ok(x)
            } else {
                Err(format!("{s:?} is not finite"))
            }
        })
    };
    let int = |s: &str| s.trim().parse::<u64>().map_err(|_| format!("expected a non-negative integer, got {s:?}"));
    Ok(match kind {
        Kind::Float => Value::Float(float(raw)?),
        Kind::Int => Value::Int(int(raw)?),
        Kind::Text if raw.is_empty() => return Err("empty value".into()),
        Kind::Text => Value::Text(raw.to_string()),
        Kind::Floats => Value::Floats(list(raw).into_iter().map(float).collect::<Result<_, _>>()?),
        Kind::Ints => Value::Ints(list(raw).into_iter().map(int).collect::<Result<_, _>>()?),
    })
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    values: BTreeMap<String, Value>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut values = BTreeMap::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = |msg: String| format!("line {}: {msg}", no + 1);
            let (key, raw) = line.split_once('=').ok_or_else(|| at(format!("expected `key = value`, got {line:?}")))?;
            let key = key.trim();
            let kind = KEYS.iter().find(|(k, _)| *k == key).map(|e| e.1).ok_or_else(|| at(format!("unknown key `{key}`")))?;
            let value = parse_value(kind, raw.trim()).map_err(|e| at(format!("{key}: {e}")))?;
            if values.insert(key.to_string(), value).is_some() {
                return Err(at(format!("duplicate key `{key}`")));
            }
        }
        Ok(Self { values })
    }

    /// Canonical text form; parsing it gives back an identical config.
    pub fn echo(&self) -> String {
        self.values.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    pub fn set(&mut self, key: &str, value: Value) {
        self.values.insert(key.to_string(), value);
    }

    pub fn f(&self, key: &str, default: f64) -> f64 {
        match self.values.get(key) {
            Some(Value::Float(x)) => *x,
            Some(Value::Int(x)) => *x as f64,
            _ => default,
        }
    }

    pub fn u(&self, key: &str, default: usize) -> usize {
        match self.values.get(key) {
            Some(Value::Int(x)) => *x as usize,
            _ => default,
        }
    }

    pub fn seed(&self) -> u64 {
        match self.values.get("run.seed") {
            Some(Value::Int(x)) => *x,
            _ => 1,
        }
    }

    pub fn text(&self, key: &str) -> Option<&str> {
        match self.values.get(key) {
            Some(Value::Text(s)) => Some(s),
            _ => None,
        }
    }

    pub fn floats(&self, key: &str, default: &[f64]) -> Vec<f64> {
        match self.values.get(key) {
            Some(Value::Floats(v)) => v.clone(),
            _ => default.to_vec(),
        }
    }

    pub fn ints(&self, key: &str, default: &[usize]) -> Vec<usize> {
        match self.values.get(key) {
            Some(Value::Ints(v)) => v.iter().map(|&x| x as usize).collect(),
            _ => default.to_vec(),
        }
    }

    pub fn model(&self) -> Result<SpectralModel, String> {
        let name = self.text("model.family").ok_or("model.family is required")?;
        let family = Family::parse(name).ok_or_else(|| format!("unknown family `{name}` (heat, damped_wave, beam, damped_wave_xi)"))?;
        let (alpha, rho, gamma, sigma, theta) =
            (self.f("model.alpha", 0.4), self.f("model.rho", 1.0), self.f("model.gamma", 0.1), self.f("model.sigma", 0.15), self.f("model.theta", 0.9));
        let (m, n) = (self.u("model.m", 1), self.u("model.n_max", 64));
        let mut model = match family {
            Family::Heat => SpectralModel::heat(m, self.f("model.beta", 1.0), gamma, sigma, theta, n),
            Family::DampedWave => SpectralModel::damped_wave(alpha, rho, gamma, sigma, theta, n),
            Family::Beam => SpectralModel::beam(m, alpha, rho, gamma, sigma, theta, n),
            Family::DampedWaveXi => SpectralModel::damped_wave_xi(alpha, rho, self.f("model.xi", 0.1), theta, n),
        };
        match self.text("model.law") {
            None | Some("lattice") => {}
            Some("power") => {
                if !self.values.contains_key("model.law_delta") {
                    return Err("model.law = power needs model.law_delta".into());
                }
                model = model.with_law(EigenLaw::Power { c: self.f("model.law_c", 1.0), delta: self.f("model.law_delta", 0.0) });
            }
            Some(other) => return Err(format!("unknown eigenvalue law `{other}` (lattice, power)")),
        }
        model = model.with_noise_amp(self.f("model.noise_amp", 1.0));
        model.validate().map_err(|e| e.to_string())?;
        Ok(model)
    }

    pub fn drift(&self, model: &SpectralModel) -> Result<DriftSpec, String> {
        let theta = self.f("drift.theta", model.theta);
        let amp = self.f("drift.amplitude", 1.0);
        Ok(match self.text("drift.kind").unwrap_or("zero") {
            "zero" => DriftSpec::zero(),
            "mode" => {
                let profile = match self.text("drift.profile").unwrap_or("holder") {
                    "holder" => Profile::HolderSign { theta },
                    "sine" => Profile::Sine,
                    "tanh" => Profile::Tanh,
                    "linear" => Profile::Linear,
                    "constant" => Profile::Constant,
                    other => return Err(format!("unknown drift.profile `{other}` (holder, sine, tanh, linear, constant)")),
                };
                DriftSpec::mode_coefficients(amp, self.f("drift.decay", 1.0), profile, theta)
            }
            "holder_sine" => {
                let c1 = amp.abs() * 2f64.powf(1.0 - theta);
                let c = move |xi: f64, y: f64, _: f64| amp * xi.sin() * y.signum() * y.abs().min(1.0).powf(theta);
                DriftSpec::nemytskii(Nemytskii::new(c, c1, amp.abs(), self.u("drift.grid", 512)), theta)
            }
            other => return Err(format!("unknown drift.kind `{other}` (zero, mode, holder_sine)")),
        })
    }

    /// `x0_k = a·k^{−d}·(1, v)` in block coordinates.
    pub fn initial(&self, n: usize) -> Vec<Vec2> {
        let (a, d, v) = (self.f("initial.amplitude", 0.0), self.f("initial.decay", 1.0), self.f("initial.velocity", 0.0));
        (1..=n).map(|k| Vec2::new(1.0, v) * (a * (k as f64).powf(-d))).collect()
    }
}
