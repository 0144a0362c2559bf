use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

/// Arithmetic-geometric mean of two positive reals.
pub fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..64 {
        let a1 = 0.5 * (a + b);
        let b1 = (a * b).sqrt();
        if (a1 - b1).abs() <= 4.0 * f64::EPSILON * a1 {
            return 0.5 * (a1 + b1);
        }
        a = a1;
        b = b1;
    }
    0.5 * (a + b)
}

/// Complete elliptic integral of the first kind K(k) for 0 < k < 1.
pub fn complete_elliptic_k(k: f64) -> Result<f64> {
    if !(k > 0.0 && k < 1.0) {
        return Err(Error::Domain(format!("elliptic modulus k = {k} must lie in (0, 1)")));
    }
    Ok(complete_k_from_complement(((1.0 - k) * (1.0 + k)).sqrt()))
}

/// K(k) expressed through the complementary modulus k', which keeps full
/// precision when k is close to 1.
pub(crate) fn complete_k_from_complement(kprime: f64) -> f64 {
    FRAC_PI_2 / agm(1.0, kprime)
}

/// Carlson's symmetric integral R_F(x, y, z) for non-negative arguments,
/// at most one of which vanishes.
pub fn carlson_rf(x: f64, y: f64, z: f64) -> Result<f64> {
    if x < 0.0 || y < 0.0 || z < 0.0 || [x + y, x + z, y + z].contains(&0.0) {
        return Err(Error::Domain(format!("carlson_rf({x}, {y}, {z})")));
    }
    let (mut x, mut y, mut z) = (x, y, z);
    for _ in 0..100 {
        let mean = (x + y + z) / 3.0;
        let dx = 1.0 - x / mean;
        let dy = 1.0 - y / mean;
        let dz = 1.0 - z / mean;
        if dx.abs().max(dy.abs()).max(dz.abs()) < 1.0e-4 {
            let e2 = dx * dy - dz * dz;
            let e3 = dx * dy * dz;
            let series = 1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0;
            return Ok(series / mean.sqrt());
        }
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lambda = sx * (sy + sz) + sy * sz;
        x = 0.25 * (x + lambda);
        y = 0.25 * (y + lambda);
        z = 0.25 * (z + lambda);
    }
    Err(Error::Convergence("carlson_rf duplication".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
        fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
            let (flm, frm) = (f(lm), f(rm));
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
                left + right + (left + right - whole) / 15.0
            } else {
                rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                    + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
            }
        }
        let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        rec(f, a, b, fa, fm, fb, whole, tol, 40)
    }

    #[test]
    fn k_matches_quadrature() {
        for &k in &[0.1, 0.5, 0.8, 0.95] {
            let f = move |phi: f64| 1.0 / (1.0 - k * k * phi.sin().powi(2)).sqrt();
            let quad = simpson(&f, 0.0, FRAC_PI_2, 1e-15);
            assert!((complete_elliptic_k(k).unwrap() - quad).abs() < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn k_limits() {
        assert!((complete_elliptic_k(1e-9).unwrap() - FRAC_PI_2).abs() < 1e-12);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let kk = complete_elliptic_k(s).unwrap();
        assert!((kk - complete_k_from_complement(s)).abs() < 1e-15);
        assert!(complete_elliptic_k(1.0).is_err());
        assert!(complete_elliptic_k(0.0).is_err());
    }

    #[test]
    fn rf_reduces_to_k() {
        let k: f64 = 0.6;
        let rf = carlson_rf(0.0, 1.0 - k * k, 1.0).unwrap();
        assert!((rf - complete_elliptic_k(k).unwrap()).abs() < 1e-14);
    }
}
