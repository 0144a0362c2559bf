use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_NOME: f64 = 0.999;
const SERIES_TOL: f64 = 1.0e-17;

/// Which of the four Jacobi theta functions to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaIndex {
    One,
    Two,
    Three,
    Four,
}

impl TryFrom<u8> for ThetaIndex {
    type Error = Error;

    fn try_from(index: u8) -> Result<Self> {
        match index {
            1 => Ok(ThetaIndex::One),
            2 => Ok(ThetaIndex::Two),
            3 => Ok(ThetaIndex::Three),
            4 => Ok(ThetaIndex::Four),
            _ => Err(Error::Domain(format!("theta index {index} not in 1..=4"))),
        }
    }
}

fn check_nome(q: f64) -> Result<f64> {
    if !(q > 0.0 && q < MAX_NOME) {
        return Err(Error::Domain(format!("nome q = {q} must lie in (0, {MAX_NOME})")));
    }
    Ok(-q.ln())
}

/// ϑ₁(z) at nome q = e^{-L}. The argument is first moved into the fundamental
/// cell |Re z| ≤ π/2, |Im z| ≤ L/2 by quasi-periodicity, keeping the exact
/// shift counts so the phase is preserved.
fn theta1_reduced(z: Complex64, big_l: f64) -> Result<Complex64> {
    let m = (z.im / big_l).round();
    let z1 = z - Complex64::new(0.0, m * big_l);
    let r = (z1.re / PI).round();
    let z2 = z1 - r * PI;

    // ϑ₁(z₁ + mπτ) = (-1)^m q^{-m²} e^{-2imz₁} ϑ₁(z₁), ϑ₁(z₂ + rπ) = (-1)^r ϑ₁(z₂)
    let exponent = Complex64::new(m * m * big_l, 0.0) - Complex64::new(0.0, 2.0 * m) * z1;
    let mut prefactor = exponent.exp();
    if !(prefactor.re.is_finite() && prefactor.im.is_finite()) {
        return Err(Error::Convergence(format!(
            "theta quasi-period prefactor overflows at Im z = {}",
            z.im
        )));
    }
    if (m as i64 + r as i64).rem_euclid(2) == 1 {
        prefactor = -prefactor;
    }

    if z2 == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(0.0, 0.0));
    }

    // terms relative to the leading one are bounded by (2n+1) e^{-L(n²+n) + 2n|y|}
    let y = z2.im.abs();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut n = 0u32;
    loop {
        let nf = n as f64;
        let weight = (-big_l * (nf + 0.5) * (nf + 0.5)).exp();
        let term = weight * ((2.0 * nf + 1.0) * z2).sin();
        if n % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        n += 1;
        let nf = n as f64;
        let bound = (2.0 * nf + 1.0) * (-big_l * (nf * nf + nf) + 2.0 * nf * y).exp();
        if bound < SERIES_TOL {
            break;
        }
        if n > 100_000 {
            return Err(Error::Convergence("theta series".into()));
        }
    }
    Ok(prefactor * 2.0 * sum)
}

/// Jacobi theta function ϑ_index(z) of nome q, built from the ϑ₁ sine series
/// and the half-period shift relations.
pub fn theta(index: ThetaIndex, z: Complex64, q: f64) -> Result<Complex64> {
    let big_l = check_nome(q)?;
    theta_with_log_nome(index, z, big_l)
}

pub(crate) fn theta_with_log_nome(index: ThetaIndex, z: Complex64, big_l: f64) -> Result<Complex64> {
    let i = Complex64::new(0.0, 1.0);
    // πτ = iL
    let pi_tau = Complex64::new(0.0, big_l);
    match index {
        ThetaIndex::One => theta1_reduced(z, big_l),
        ThetaIndex::Two => theta1_reduced(z + FRAC_PI_2, big_l),
        ThetaIndex::Three => {
            let phase = (-i * (z - pi_tau / 4.0)).exp();
            Ok(phase * theta1_reduced(z + FRAC_PI_2 - pi_tau / 2.0, big_l)?)
        }
        ThetaIndex::Four => {
            let phase = i * (-i * (z - pi_tau / 4.0)).exp();
            Ok(phase * theta1_reduced(z - pi_tau / 2.0, big_l)?)
        }
    }
}

/// Theta constants ϑ₂(0), ϑ₃(0), ϑ₄(0) from their direct q-series.
pub(crate) fn theta_constants(q: f64) -> (f64, f64, f64) {
    let mut t2 = 0.0;
    let mut t3 = 1.0;
    let mut t4 = 1.0;
    let mut n = 0u32;
    loop {
        let nf = n as f64;
        let half = q.powf((nf + 0.5) * (nf + 0.5));
        t2 += 2.0 * half;
        if n > 0 {
            let full = q.powf(nf * nf);
            t3 += 2.0 * full;
            t4 += if n % 2 == 0 { 2.0 * full } else { -2.0 * full };
        }
        if half < SERIES_TOL * t3 && n > 0 {
            break;
        }
        n += 1;
    }
    (t2, t3, t4)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn theta1_vanishes_at_origin() {
        for &q in &[0.01, 0.3, 0.9] {
            assert_eq!(theta(ThetaIndex::One, c(0.0, 0.0), q).unwrap().norm(), 0.0);
        }
    }

    #[test]
    fn theta2_is_shifted_theta1() {
        let q = 0.37;
        let (t2, t3, t4) = theta_constants(q);
        let a = theta(ThetaIndex::One, c(FRAC_PI_2, 0.0), q).unwrap();
        assert!((a - t2).norm() < 1e-14);
        assert!((theta(ThetaIndex::Three, c(0.0, 0.0), q).unwrap() - t3).norm() < 1e-14);
        assert!((theta(ThetaIndex::Four, c(0.0, 0.0), q).unwrap() - t4).norm() < 1e-14);
    }

    #[test]
    fn jacobi_identity_of_constants() {
        for &q in &[0.05, 0.4, 0.8] {
            let (t2, t3, t4) = theta_constants(q);
            assert!((t3.powi(4) - t2.powi(4) - t4.powi(4)).abs() < 1e-13 * t3.powi(4));
        }
    }

    #[test]
    fn quasi_periodicity_far_from_cell() {
        let q: f64 = 0.2;
        let l = -q.ln();
        let pi_tau = c(0.0, l);
        let i = c(0.0, 1.0);
        for z in [c(0.3, 0.1), c(-1.2, 0.4), c(2.0, -0.3)] {
            for shift in 1..4 {
                let s = shift as f64;
                let lhs = theta(ThetaIndex::One, z + s * pi_tau, q).unwrap();
                let sign = if shift % 2 == 0 { 1.0 } else { -1.0 };
                let rhs = sign * (-i * s * s * pi_tau - 2.0 * i * s * z).exp()
                    * theta(ThetaIndex::One, z, q).unwrap();
                assert!((lhs - rhs).norm() < 1e-12 * rhs.norm().max(1.0));
            }
        }
    }

    #[test]
    fn rejects_bad_nome() {
        assert!(theta(ThetaIndex::One, c(0.1, 0.0), 0.9995).is_err());
        assert!(theta(ThetaIndex::One, c(0.1, 0.0), 0.0).is_err());
        assert!(ThetaIndex::try_from(5).is_err());
    }
}
