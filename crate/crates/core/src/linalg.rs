//! Closed-form 2×2 helpers. Every block in this crate is at most 2×2, so
//! nothing here iterates.

use nalgebra::{Matrix2, Vector2};

pub type Mat2 = Matrix2<f64>;
pub type Vec2 = Vector2<f64>;

/// Eigen-decomposition of a symmetric 2×2 matrix. Eigenvalues ascending,
/// eigenvectors in the matching columns.
pub fn sym_eig(s: &Mat2) -> ([f64; 2], Mat2) {
    let (p, q, r) = (s[(0, 0)], 0.5 * (s[(0, 1)] + s[(1, 0)]), s[(1, 1)]);
    let scale = p.abs().max(r.abs()).max(q.abs());
    if scale == 0.0 || q.abs() <= f64::EPSILON * 1e-3 * scale {
        return if p <= r { ([p, r], Mat2::identity()) } else { ([r, p], Mat2::new(0.0, 1.0, 1.0, 0.0)) };
    }
    let half = 0.5 * (p - r);
    let rad = half.hypot(q);
    let mean = 0.5 * (p + r);
    let hi = mean + rad;
    // the smaller eigenvalue from the determinant where that avoids cancellation
    let lo = if mean > 0.0 { (p * r - q * q) / hi } else { mean - rad };
    let theta = 0.5 * (2.0 * q).atan2(p - r);
    let (sn, cs) = theta.sin_cos();
    // column 0 ↔ lo, column 1 ↔ hi
    let v = Mat2::new(-sn, cs, cs, sn);
    ([lo, hi], v)
}

/// Largest eigenvalue of a symmetric 2×2 matrix.
pub fn sym_max_eig(s: &Mat2) -> f64 {
    let (p, q, r) = (s[(0, 0)], 0.5 * (s[(0, 1)] + s[(1, 0)]), s[(1, 1)]);
    0.5 * (p + r) + (0.5 * (p - r)).hypot(q)
}

/// Euclidean operator norm.
pub fn spectral_norm(m: &Mat2) -> f64 {
    sym_max_eig(&(m.transpose() * m)).max(0.0).sqrt()
}

/// Operator norm of `m` when the coordinates carry the inner product
/// `⟨u, v⟩ = uᵀ g v`: the square root of the top eigenvalue of
/// `mᵀ g m v = λ g v`, from trace and determinant of `g⁻¹ mᵀ g m`.
pub fn gram_norm(m: &Mat2, g: &Mat2) -> f64 {
    let gi = match g.try_inverse() {
        Some(gi) => gi,
        None => return f64::NAN,
    };
    let n = gi * m.transpose() * g * m;
    let tr = n.trace();
    let det = m.determinant().powi(2);
    let disc = (0.25 * tr * tr - det).max(0.0);
    (0.5 * tr + disc.sqrt()).max(0.0).sqrt()
}

/// Symmetric square root of a positive semidefinite matrix.
pub fn sym_sqrt(s: &Mat2) -> Mat2 {
    sym_fn(s, |x| x.max(0.0).sqrt())
}

/// Symmetric inverse square root; `None` when an eigenvalue is not positive.
pub fn sym_inv_sqrt(s: &Mat2) -> Option<Mat2> {
    let (vals, _) = sym_eig(s);
    if vals[0] <= 0.0 {
        return None;
    }
    Some(sym_fn(s, |x| 1.0 / x.sqrt()))
}

/// Ratio of extreme eigenvalues of a symmetric matrix (infinite if singular).
pub fn sym_condition(s: &Mat2) -> f64 {
    let ([lo, hi], _) = sym_eig(s);
    if lo <= 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

fn sym_fn(s: &Mat2, f: impl Fn(f64) -> f64) -> Mat2 {
    let (vals, v) = sym_eig(s);
    let d = Mat2::new(f(vals[0]), 0.0, 0.0, f(vals[1]));
    v * d * v.transpose()
}

/// Factor `l` with `l lᵀ = q` for a symmetric positive semidefinite `q`,
/// zeroing eigenvalues below `1e-14 · trace`.
pub fn psd_factor(q: &Mat2) -> Mat2 {
    let (vals, v) = sym_eig(q);
    let floor = 1e-14 * q.trace().abs();
    let r = |x: f64| if x <= floor { 0.0 } else { x.sqrt() };
    v * Mat2::new(r(vals[0]), 0.0, 0.0, r(vals[1]))
}

/// Symmetrise in place of rounding noise.
pub fn symmetrize(m: &Mat2) -> Mat2 {
    0.5 * (m + m.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eig_reconstructs() {
        let s = Mat2::new(2.0, 0.3, 0.3, -1.0);
        let (vals, v) = sym_eig(&s);
        let back = v * Mat2::new(vals[0], 0.0, 0.0, vals[1]) * v.transpose();
        assert!((back - s).norm() < 1e-14);
        assert!(vals[0] < vals[1]);
        let diag = Mat2::new(3.0, 0.0, 0.0, 1.0);
        let (vals, v) = sym_eig(&diag);
        assert_eq!(vals, [1.0, 3.0]);
        assert!((v * Mat2::new(1.0, 0.0, 0.0, 3.0) * v.transpose() - diag).norm() < 1e-15);
    }

    #[test]
    fn gram_norm_matches_whitened_svd() {
        let m = Mat2::new(0.4, -1.2, 0.7, 2.5);
        let g = Mat2::new(2.0, 0.5, 0.5, 1.0);
        let r = sym_sqrt(&g);
        let ri = r.try_inverse().unwrap();
        let svd = (r * m * ri).singular_values();
        let want = svd[0].max(svd[1]);
        assert!((gram_norm(&m, &g) - want).abs() < 1e-12 * want);
        assert!((gram_norm(&m, &Mat2::identity()) - spectral_norm(&m)).abs() < 1e-12);
    }

    #[test]
    fn factor_and_roots() {
        let q = Mat2::new(4.0, 1.0, 1.0, 3.0);
        let l = psd_factor(&q);
        assert!((l * l.transpose() - q).norm() < 1e-13);
        let s = sym_sqrt(&q);
        assert!((s * s - q).norm() < 1e-13);
        let si = sym_inv_sqrt(&q).unwrap();
        assert!((si * q * si - Mat2::identity()).norm() < 1e-13);
        let rank1 = Mat2::new(1.0, 1.0, 1.0, 1.0);
        let l = psd_factor(&rank1);
        assert!((l * l.transpose() - rank1).norm() < 1e-14);
        assert!(sym_inv_sqrt(&rank1).is_none());
    }
}
