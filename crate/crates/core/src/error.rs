use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("resonant eigenvalue: mu = {mu}, rho = {rho}, alpha = {alpha} gives discriminant {discriminant:e}")]
    ResonantEigenvalue { mu: f64, rho: f64, alpha: f64, discriminant: f64 },
    #[error("degenerate samples: {0}")]
    DegenerateSamples(String),
    #[error("quadrature failed to reach relative tolerance {tol:e} on {what}")]
    QuadratureFailure { what: String, tol: f64 },
    #[error("Q_s numerically singular on block {index} at s = {s:e} (condition number {cond:e})")]
    SingularQt { index: usize, s: f64, cond: f64 },
    #[error("no covering result for family {0}")]
    UnsupportedFamily(String),
    #[error("non-finite state at step {step}")]
    NonFiniteState { step: usize },
    #[error("control gain ill-conditioned on block {index}: |lambda+ - lambda-| = {gap:e}")]
    IllConditionedK { index: usize, gap: f64 },
    #[error("Picard map does not contract: successive ratio {ratio:.4} at iteration {iteration}")]
    NoContraction { ratio: f64, iteration: usize },
    #[error("path left the Kolmogorov grid box at t = {time}")]
    PathLeftBox { time: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
