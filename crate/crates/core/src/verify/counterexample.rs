use crate::dst::SineTransform;
use crate::models::counterexample_c;

/// Residuals of `y_ττ − y_ξξ + (−∂²_ξ)^{7/12} y_τ − c(ξ, y)` for the two
/// candidate solutions `y ≡ 0` and `y = τ⁸ sin 2ξ` on `[0,1] × (0,π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub time_points: usize,
    pub intervals: usize,
    pub max_residual_zero: f64,
    pub max_residual_nonzero: f64,
    /// Largest `|y|` of the nonzero solution; the cutoff is inactive below 2.
    pub max_abs_y: f64,
    /// Largest absolute value of each term of the equation for the nonzero
    /// solution: `y_ττ`, `−y_ξξ`, the fractional damping and `c`.
    pub term_max: [f64; 4],
    /// `max |y(0,·)| + max |y_τ(0,·)|`.
    pub initial_data: f64,
}

/// Spatial operators are applied spectrally through the sine transform on
/// `intervals` cells; time derivatives are exact.
pub fn counterexample_residual(time_points: usize, intervals: usize) -> ResidualReport {
    assert!(time_points >= 2 && intervals >= 4);
    let st = SineTransform::new(intervals);
    let xi = st.grid();
    let modes = intervals - 1;
    let frac = |v: &[f64], p: f64| -> Vec<f64> {
        let mut c = st.analyze(v, modes);
        c.iter_mut().enumerate().for_each(|(k, a)| *a *= ((k + 1) as f64).powf(2.0 * p));
        st.synthesize(&c)
    };
    let s2: Vec<f64> = xi.iter().map(|x| (2.0 * x).sin()).collect();
    let mut rep =
        ResidualReport { time_points, intervals, max_residual_zero: 0.0, max_residual_nonzero: 0.0, max_abs_y: 0.0, term_max: [0.0; 4], initial_data: 0.0 };
    for i in 0..time_points {
        let tau = i as f64 / (time_points - 1) as f64;
        let y: Vec<f64> = s2.iter().map(|s| tau.powi(8) * s).collect();
        let yt: Vec<f64> = s2.iter().map(|s| 8.0 * tau.powi(7) * s).collect();
        let ytt: Vec<f64> = s2.iter().map(|s| 56.0 * tau.powi(6) * s).collect();
        let lap = frac(&y, 1.0);
        let damp = frac(&yt, 7.0 / 12.0);
        for j in 0..xi.len() {
            let c = counterexample_c(xi[j], y[j]);
            let terms = [ytt[j], lap[j], damp[j], c];
            for (m, t) in rep.term_max.iter_mut().zip(terms) {
                *m = m.max(t.abs());
            }
            rep.max_residual_nonzero = rep.max_residual_nonzero.max((ytt[j] + lap[j] + damp[j] - c).abs());
            rep.max_residual_zero = rep.max_residual_zero.max(counterexample_c(xi[j], 0.0).abs());
            rep.max_abs_y = rep.max_abs_y.max(y[j].abs());
            if i == 0 {
                rep.initial_data = rep.initial_data.max(y[j].abs() + yt[j].abs());
            }
        }
    }
    rep
}
