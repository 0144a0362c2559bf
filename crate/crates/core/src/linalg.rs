//! Dense complex determinant, inverse and pfaffian.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

const SKEW_TOL: f64 = 1.0e-13;
const PIVOT_TOL: f64 = 1.0e-13;

/// A square complex matrix with M[i][j] = −M[j][i] and zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewMatrix {
    entries: CMatrix,
}

impl SkewMatrix {
    /// Validates antisymmetry to 1e−13 relative to the largest entry; the
    /// diagonal is then set to exactly zero.
    pub fn new(mut entries: CMatrix) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::Precondition(format!(
                "skew matrix must be square, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let scale = entries.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let n = entries.nrows();
        let mut worst = 0.0f64;
        for i in 0..n {
            worst = worst.max(entries[(i, i)].norm());
            for j in 0..i {
                worst = worst.max((entries[(i, j)] + entries[(j, i)]).norm());
            }
        }
        if worst > SKEW_TOL * scale {
            return Err(Error::NotSkewSymmetric(worst / scale));
        }
        for i in 0..n {
            entries[(i, i)] = Complex64::new(0.0, 0.0);
        }
        Ok(Self { entries })
    }

    /// Builds an exactly antisymmetric matrix from its strict upper triangle.
    pub fn from_upper(dim: usize, mut upper: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut entries = CMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in i + 1..dim {
                let v = upper(i, j);
                entries[(i, j)] = v;
                entries[(j, i)] = -v;
            }
        }
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_inner(self) -> CMatrix {
        self.entries
    }
}

/// Pfaffian by skew-symmetric Parlett–Reid elimination with partial pivoting.
/// Odd dimensions give zero; the empty matrix gives one.
pub fn pfaffian(m: &SkewMatrix) -> Complex64 {
    let n = m.dim();
    if n % 2 == 1 {
        return Complex64::new(0.0, 0.0);
    }
    let mut a = m.entries.clone();
    let mut value = Complex64::new(1.0, 0.0);
    for k in (0..n.saturating_sub(1)).step_by(2) {
        let (mut kp, mut best) = (k + 1, a[(k + 1, k)].norm());
        for r in k + 2..n {
            let v = a[(r, k)].norm();
            if v > best {
                kp = r;
                best = v;
            }
        }
        if kp != k + 1 {
            a.swap_rows(k + 1, kp);
            a.swap_columns(k + 1, kp);
            value = -value;
        }
        let pivot = a[(k, k + 1)];
        if pivot == Complex64::new(0.0, 0.0) {
            return Complex64::new(0.0, 0.0);
        }
        value *= pivot;
        if k + 2 < n {
            let tau: Vec<Complex64> = (k + 2..n).map(|j| a[(k, j)] / pivot).collect();
            let col: Vec<Complex64> = (k + 2..n).map(|i| a[(i, k + 1)]).collect();
            for (ii, i) in (k + 2..n).enumerate() {
                for (jj, j) in (k + 2..n).enumerate() {
                    a[(i, j)] += tau[ii] * col[jj] - col[ii] * tau[jj];
                }
            }
        }
    }
    value
}

fn check_square(m: &CMatrix) -> Result<()> {
    if m.is_square() {
        Ok(())
    } else {
        Err(Error::Precondition(format!("matrix must be square, got {}x{}", m.nrows(), m.ncols())))
    }
}

/// Determinant via pivoted LU.
pub fn determinant(m: &CMatrix) -> Result<Complex64> {
    check_square(m)?;
    if m.nrows() == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    Ok(m.clone().lu().determinant())
}

/// Determinant and inverse via pivoted LU; a pivot below 1e−13 of the largest
/// row norm is reported as singular.
pub fn det_and_inverse(m: &CMatrix) -> Result<(Complex64, CMatrix)> {
    check_square(m)?;
    let n = m.nrows();
    if n == 0 {
        return Ok((Complex64::new(1.0, 0.0), CMatrix::zeros(0, 0)));
    }
    let row_norm = (0..n)
        .map(|i| m.row(i).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let lu = m.clone().lu();
    let u = lu.u();
    let min_pivot = (0..n).map(|i| u[(i, i)].norm()).fold(f64::INFINITY, f64::min);
    if !(min_pivot >= PIVOT_TOL * row_norm) || row_norm == 0.0 {
        return Err(Error::Singular(if row_norm > 0.0 { min_pivot / row_norm } else { 0.0 }));
    }
    let det = lu.determinant();
    let inv = lu.try_inverse().ok_or(Error::Singular(0.0))?;
    Ok((det, inv))
}

/// Largest entrywise modulus of a − b.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Largest entrywise |a − b| / max(1, |b|).
pub fn max_scaled_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm() / y.norm().max(1.0))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn random_skew(n: usize, rng: &mut ChaCha8Rng) -> SkewMatrix {
        SkewMatrix::from_upper(n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    #[test]
    fn small_pfaffians() {
        let m = SkewMatrix::from_upper(2, |_, _| c(3.5));
        assert_eq!(pfaffian(&m), c(3.5));
        let vals = [[0.0, 1.0, 2.0, 3.0], [0.0, 0.0, 4.0, 5.0], [0.0, 0.0, 0.0, 6.0]];
        let m = SkewMatrix::from_upper(4, |i, j| c(vals[i][j]));
        let expected = 1.0 * 6.0 - 2.0 * 5.0 + 3.0 * 4.0;
        assert!((pfaffian(&m) - expected).norm() < 1e-14);
        assert_eq!(pfaffian(&SkewMatrix::from_upper(3, |_, _| c(1.0))), c(0.0));
        assert_eq!(pfaffian(&SkewMatrix::from_upper(0, |_, _| c(1.0))), c(1.0));
    }

    #[test]
    fn pfaffian_squared_is_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [2, 4, 6, 8, 10] {
            let m = random_skew(n, &mut rng);
            let pf = pfaffian(&m);
            let det = determinant(m.entries()).unwrap();
            assert!((pf * pf - det).norm() < 1e-10 * det.norm());
        }
    }

    #[test]
    fn permutation_changes_sign() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = random_skew(6, &mut rng);
        let mut p = m.entries().clone();
        p.swap_rows(1, 4);
        p.swap_columns(1, 4);
        let swapped = SkewMatrix::new(p).unwrap();
        assert!((pfaffian(&swapped) + pfaffian(&m)).norm() < 1e-12);
    }

    #[test]
    fn skew_validation() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = c(1.0);
        m[(1, 0)] = c(-0.9);
        assert!(matches!(SkewMatrix::new(m), Err(Error::NotSkewSymmetric(_))));
        assert!(SkewMatrix::new(CMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn det_inverse_examples() {
        let (d, inv) = det_and_inverse(&CMatrix::identity(3, 3)).unwrap();
        assert_eq!(d, c(1.0));
        assert_eq!(inv, CMatrix::identity(3, 3));
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(2.0), c(3.0)]));
        let (d, inv) = det_and_inverse(&m).unwrap();
        assert!((d - 6.0).norm() < 1e-15);
        assert!((inv[(0, 0)] - 0.5).norm() < 1e-15 && (inv[(1, 1)] - 1.0 / 3.0).norm() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = CMatrix::from_fn(10, 10, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let (_, inv) = det_and_inverse(&m).unwrap();
        assert!(max_abs_diff(&(&m * &inv), &CMatrix::identity(10, 10)) < 1e-10);
        let mut s = CMatrix::identity(2, 2);
        s[(1, 1)] = c(0.0);
        assert!(matches!(det_and_inverse(&s), Err(Error::Singular(_))));
    }
}
