use nalgebra::DMatrix;

use super::operators::SpinOperatorSet;
use super::spectrum::log_eigensystem;
use crate::error::{Error, Result};

/// Largest width and height accepted by the dense trace-ratio evaluation.
pub const MAX_CORRELATION_WIDTH: usize = 10;
pub const MAX_CORRELATION_HEIGHT: usize = 64;

/// A matrix power kept as (mantissa matrix, log of its scale).
fn scaled_power(m: &DMatrix<f64>, k: usize) -> (DMatrix<f64>, f64) {
    let dim = m.nrows();
    let mut result = DMatrix::identity(dim, dim);
    let mut log_result = 0.0;
    let mut base = m.clone();
    let mut log_base = 0.0;
    let mut e = k;
    let renorm = |x: &mut DMatrix<f64>, log: &mut f64| {
        let s = x.amax();
        if s > 0.0 {
            *x /= s;
            *log += s.ln();
        }
    };
    while e > 0 {
        if e & 1 == 1 {
            result = &result * &base;
            log_result += log_base;
            renorm(&mut result, &mut log_result);
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
            log_base *= 2.0;
            renorm(&mut base, &mut log_base);
        }
    }
    (result, log_result)
}

/// Σ_b Σ_d x[b,d] y[d, π(b)] = Tr[X Y P] for the permutation matrix P[d,b] = [d = π(b)].
fn trace_with_permutation(x: &DMatrix<f64>, y: &DMatrix<f64>, perm: Option<&[usize]>) -> f64 {
    let dim = x.nrows();
    let mut acc = 0.0;
    for b in 0..dim {
        let target = perm.map_or(b, |p| p[b]);
        for d in 0..dim {
            acc += x[(b, d)] * y[(d, target)];
        }
    }
    acc
}

/// The trace ratio Tr[s_0 V^{dx} T^{dy} s_0 T^{−dy} V^{M−dx} U^{(1−ε_x)/2}] / Tr[V^M U^{(1−ε_x)/2}]
/// evaluated with dense matrix powers.
pub fn oracle_correlation(ops: &SpinOperatorSet, m_height: usize, dx: usize, dy: i64, eps_x: i8) -> Result<f64> {
    if ops.n() > MAX_CORRELATION_WIDTH || m_height > MAX_CORRELATION_HEIGHT {
        return Err(Error::Resource(format!(
            "dense trace ratio limited to N <= {MAX_CORRELATION_WIDTH}, M <= {MAX_CORRELATION_HEIGHT}"
        )));
    }
    if m_height == 0 || dx > m_height || eps_x.abs() != 1 {
        return Err(Error::Domain(format!("need 0 <= dx <= M, M > 0, eps_x = ±1; got dx = {dx}, M = {m_height}, eps_x = {eps_x}")));
    }
    let v = ops.reduced_v();
    let (a, _) = scaled_power(v, dx);
    let (b, _) = scaled_power(v, m_height - dx);
    let s0 = ops.spin_diagonal(0);
    let sl = ops.translated_spin_diagonal(dy);
    let left = DMatrix::from_fn(a.nrows(), a.ncols(), |r, col| s0[r] * a[(r, col)]);
    let right = DMatrix::from_fn(b.nrows(), b.ncols(), |r, col| sl[r] * b[(r, col)]);
    let perm = if eps_x == -1 { Some(ops.flip_map()) } else { None };
    let numerator = trace_with_permutation(&left, &right, perm);
    let denominator = trace_with_permutation(&a, &b, perm);
    if denominator == 0.0 {
        return Err(Error::Singular(0.0));
    }
    Ok(numerator / denominator)
}

/// Relative difference between Tr V^M from the eigenvalues and from a dense power.
pub fn spectral_trace_residual(ops: &SpinOperatorSet, m_height: usize) -> f64 {
    let (logs, _) = log_eigensystem(ops);
    let top = logs[0] - ops.log_scale();
    let spectral: f64 = logs.iter().map(|l| (m_height as f64 * (l - ops.log_scale() - top)).exp()).sum();
    let (p, lp) = scaled_power(ops.reduced_v(), m_height);
    let dense = p.trace() * (lp - m_height as f64 * top).exp();
    (spectral - dense).abs() / dense.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Couplings;

    #[test]
    fn trivial_separation() {
        let c = Couplings::new(4, 0.4, 0.7).unwrap();
        for eps_y in [1, -1] {
            let ops = SpinOperatorSet::new(&c, eps_y).unwrap();
            for eps_x in [1, -1] {
                assert!((oracle_correlation(&ops, 5, 0, 0, eps_x).unwrap() - 1.0).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn reflection_invariance() {
        let c = Couplings::new(5, 0.4, 0.7).unwrap();
        let ops = SpinOperatorSet::new(&c, 1).unwrap();
        for dy in 1..5 {
            let a = oracle_correlation(&ops, 6, 2, dy, 1).unwrap();
            let b = oracle_correlation(&ops, 6, 2, 5 - dy, 1).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn spectral_trace() {
        let c = Couplings::new(5, 0.3, 0.9).unwrap();
        let ops = SpinOperatorSet::new(&c, 1).unwrap();
        for m in [1, 4, 17] {
            assert!(spectral_trace_residual(&ops, m) < 1e-10);
        }
    }

    #[test]
    fn height_approaches_cylinder() {
        let c = Couplings::new(4, 0.4, 0.7).unwrap();
        let ops = SpinOperatorSet::new(&c, 1).unwrap();
        let vals: Vec<f64> = [8, 16, 32, 64].iter().map(|&m| oracle_correlation(&ops, m, 1, 1, 1).unwrap()).collect();
        for w in vals.windows(3) {
            assert!((w[2] - w[1]).abs() <= (w[1] - w[0]).abs() + 1e-14);
        }
    }
}
