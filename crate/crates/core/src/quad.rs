//! Quadrature rules and compensated summation.

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::hermite::GaussHermite;
use gauss_quad::legendre::GaussLegendre;

use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights on [-1, 1].
pub fn legendre(order: usize) -> Vec<(f64, f64)> {
    let n = NonZeroUsize::new(order).expect("quadrature order must be positive");
    GaussLegendre::new(n).as_node_weight_pairs().to_vec()
}

fn gl10() -> &'static [(f64, f64)] {
    static R: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    R.get_or_init(|| legendre(10))
}

fn gl20() -> &'static [(f64, f64)] {
    static R: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    R.get_or_init(|| legendre(20))
}

/// 20-point Gauss–Legendre rule on [a, b] for vector-valued integrands.
pub fn gl20_panel<const K: usize>(f: &mut impl FnMut(f64) -> [f64; K], a: f64, b: f64) -> [f64; K] {
    panel(gl20(), f, a, b)
}

fn panel<const K: usize>(rule: &[(f64, f64)], f: &mut impl FnMut(f64) -> [f64; K], a: f64, b: f64) -> [f64; K] {
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let mut acc = [0.0; K];
    for &(x, w) in rule {
        let v = f(mid + half * x);
        for k in 0..K {
            acc[k] += w * v[k];
        }
    }
    acc.map(|s| s * half)
}

struct Panel<const K: usize> {
    a: f64,
    b: f64,
    value: [f64; K],
    err: [f64; K],
}

fn eval_panel<const K: usize>(f: &mut impl FnMut(f64) -> [f64; K], a: f64, b: f64) -> Panel<K> {
    let hi = panel(gl20(), f, a, b);
    let lo = panel(gl10(), f, a, b);
    let mut err = [0.0; K];
    for k in 0..K {
        err[k] = (hi[k] - lo[k]).abs();
    }
    Panel { a, b, value: hi, err }
}

/// Globally adaptive Gauss–Legendre quadrature of a vector-valued integrand.
///
/// Each entry must meet `rtol` relative to its own magnitude, but never
/// tighter than a few ulps of the largest entry.
/// The error estimate is the 10/20-point difference, which is conservative
/// for the 20-point value that is returned.
pub fn adaptive<const K: usize>(mut f: impl FnMut(f64) -> [f64; K], a: f64, b: f64, rtol: f64, max_panels: usize) -> Result<[f64; K]> {
    if a == b {
        return Ok([0.0; K]);
    }
    let init = 8;
    let w = (b - a) / init as f64;
    let mut panels: Vec<Panel<K>> = (0..init)
        .map(|i| {
            let pa = a + w * i as f64;
            let pb = if i + 1 == init { b } else { pa + w };
            eval_panel(&mut f, pa, pb)
        })
        .collect();
    loop {
        let mut total = [0.0; K];
        let mut err = [0.0; K];
        for p in &panels {
            for k in 0..K {
                total[k] += p.value[k];
                err[k] += p.err[k];
            }
        }
        let scale = total.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let tol: [f64; K] = std::array::from_fn(|k| (rtol * total[k].abs()).max(64.0 * f64::EPSILON * scale));
        let worst = (0..K)
            .map(|k| {
                if tol[k] > 0.0 {
                    err[k] / tol[k]
                } else if err[k] > 0.0 {
                    f64::INFINITY
                } else {
                    0.0
                }
            })
            .fold(0.0f64, f64::max);
        if worst <= 1.0 {
            return Ok(total);
        }
        if panels.len() >= max_panels {
            return Err(Error::QuadratureFailure { what: format!("[{a:e}, {b:e}] after {} panels", panels.len()), tol: rtol });
        }
        // split the panel contributing most to the normalised error
        let (idx, _) = panels
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let score = (0..K).map(|k| if tol[k] > 0.0 { p.err[k] / tol[k] } else { p.err[k] }).fold(0.0f64, f64::max);
                (i, score)
            })
            .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        let p = panels.swap_remove(idx);
        let m = 0.5 * (p.a + p.b);
        panels.push(eval_panel(&mut f, p.a, m));
        panels.push(eval_panel(&mut f, m, p.b));
    }
}

/// Scalar convenience wrapper around [`adaptive`].
pub fn adaptive_scalar(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, rtol: f64, max_panels: usize) -> Result<f64> {
    adaptive(|x| [f(x)], a, b, rtol, max_panels).map(|v| v[0])
}

/// Nodes and weights for `E f(Z)`, `Z ~ N(0, 1)`; the weights sum to one.
pub fn hermite_normal(order: usize) -> Vec<(f64, f64)> {
    let n = NonZeroUsize::new(order).expect("quadrature order must be positive");
    let rule = GaussHermite::new(n);
    let norm = std::f64::consts::PI.sqrt();
    rule.as_node_weight_pairs().iter().map(|&(x, w)| (std::f64::consts::SQRT_2 * x, w / norm)).collect()
}

/// Neumaier's compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn compensated_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = Neumaier::default();
    for x in xs {
        acc.add(x);
    }
    acc.value()
}
