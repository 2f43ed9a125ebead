//! Sine-series transforms on `(0, π)` through a real-to-complex FFT of the
//! odd extension.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Transform between coefficients `a_k` of `u = Σ a_k √(2/π) sin(kξ)`,
/// `k = 1..N−1`, and values `u(jπ/N)`, `j = 1..N−1`.
#[derive(Clone)]
pub struct SineTransform {
    n: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for SineTransform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SineTransform").field("n", &self.n).finish()
    }
}

impl SineTransform {
    pub fn new(n: usize) -> Self {
        assert!(n >= 2, "sine transform needs N >= 2");
        let fft = FftPlanner::new().plan_fft_forward(2 * n);
        Self { n, fft }
    }

    /// Number of grid intervals `N`.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Interior grid points `jπ/N`.
    pub fn grid(&self) -> Vec<f64> {
        (1..self.n).map(|j| j as f64 * PI / self.n as f64).collect()
    }

    /// Raw DST-I: `X_k = Σ_j x_j sin(πjk/N)` for `k = 1..N−1`.
    fn dst1(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut buf = vec![Complex64::new(0.0, 0.0); 2 * n];
        for (j, &v) in x.iter().enumerate().take(n - 1) {
            buf[j + 1] = Complex64::new(v, 0.0);
            buf[2 * n - 1 - j] = Complex64::new(-v, 0.0);
        }
        self.fft.process(&mut buf);
        (1..n).map(|k| -0.5 * buf[k].im).collect()
    }

    /// Grid values from the first `coeffs.len()` coefficients (the rest zero).
    pub fn synthesize(&self, coeffs: &[f64]) -> Vec<f64> {
        assert!(coeffs.len() < self.n, "{} coefficients need a grid finer than N = {}", coeffs.len(), self.n);
        let s = (2.0 / PI).sqrt();
        let padded: Vec<f64> = (0..self.n - 1).map(|k| coeffs.get(k).map_or(0.0, |c| s * c)).collect();
        self.dst1(&padded)
    }

    /// First `modes` coefficients `∫₀^π u e_k` by the trapezoid rule on the
    /// grid; exact for sine polynomials of degree below `N`.
    pub fn analyze(&self, values: &[f64], modes: usize) -> Vec<f64> {
        assert_eq!(values.len(), self.n - 1);
        let w = (2.0 / PI).sqrt() * PI / self.n as f64;
        let mut out = self.dst1(values);
        out.truncate(modes);
        out.iter_mut().for_each(|v| *v *= w);
        out
    }
}
