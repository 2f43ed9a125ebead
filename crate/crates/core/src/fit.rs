use crate::error::{Error, Result};

/// Least-squares power law `value ≈ e^intercept · time^slope`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentFit {
    pub abscissae: Vec<f64>,
    pub values: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Fits a line to `(ln t, ln v)`. Times must be strictly decreasing and
/// positive, values positive, and at least four samples are required.
pub fn fit_exponent(samples: &[(f64, f64)]) -> Result<ExponentFit> {
    if samples.len() < 4 {
        return Err(Error::DegenerateSamples(format!("{} samples, need at least 4", samples.len())));
    }
    for w in samples.windows(2) {
        if !(w[1].0 < w[0].0) {
            return Err(Error::DegenerateSamples("times are not strictly decreasing".into()));
        }
    }
    if let Some(&(t, v)) = samples.iter().find(|&&(t, v)| !(t > 0.0) || !(v > 0.0) || !v.is_finite()) {
        return Err(Error::DegenerateSamples(format!("non-positive sample ({t}, {v})")));
    }
    let n = samples.len() as f64;
    let xs: Vec<f64> = samples.iter().map(|s| s.0.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    Ok(ExponentFit { abscissae: samples.iter().map(|s| s.0).collect(), values: samples.iter().map(|s| s.1).collect(), slope, intercept, r_squared })
}

/// `2^{-lo}, …, 2^{-hi}`: a decreasing geometric grid.
pub fn dyadic_grid(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|k| 2f64.powi(-k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_lines() {
        let ts = dyadic_grid(0, 6);
        let s: Vec<_> = ts.iter().map(|&t| (t, t)).collect();
        let f = fit_exponent(&s).unwrap();
        assert!((f.slope - 1.0).abs() < 1e-14);
        assert!((f.r_squared - 1.0).abs() < 1e-14);
        let s: Vec<_> = ts.iter().map(|&t| (t, 3.0 * t.powf(-1.5))).collect();
        let f = fit_exponent(&s).unwrap();
        assert!((f.slope + 1.5).abs() < 1e-10);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_samples() {
        assert!(fit_exponent(&[(1.0, 1.0), (0.5, 1.0), (0.25, 1.0)]).is_err());
        assert!(fit_exponent(&[(1.0, 1.0), (0.5, 1.0), (0.5, 1.0), (0.1, 1.0)]).is_err());
        assert!(fit_exponent(&[(1.0, 1.0), (0.5, 0.0), (0.25, 1.0), (0.1, 1.0)]).is_err());
    }
}
