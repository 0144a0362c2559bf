use std::f64::consts::PI;

use num_complex::Complex64;

use super::integrals::{carlson_rf, complete_k_from_complement};
use super::theta::{theta_constants, theta_with_log_nome, ThetaIndex};
use crate::error::{Error, Result};

const MIN_NOME_LOG: f64 = 1.0005e-3;

/// Real elliptic modulus 0 < k < 1 together with its periods and nome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticModulus {
    k: f64,
    kprime: f64,
    big_k: f64,
    big_kprime: f64,
    log_nome: f64,
    theta2: f64,
    theta3: f64,
    theta4: f64,
}

impl EllipticModulus {
    pub fn new(k: f64) -> Result<Self> {
        if !(k > 0.0 && k < 1.0) {
            return Err(Error::Domain(format!("elliptic modulus k = {k} must lie in (0, 1)")));
        }
        Self::from_pair(k, ((1.0 - k) * (1.0 + k)).sqrt())
    }

    /// Builds the modulus from k and k' given separately, which avoids the
    /// cancellation in √(1−k²) when either is close to 1.
    pub fn from_pair(k: f64, kprime: f64) -> Result<Self> {
        if !(k > 0.0 && k < 1.0 && kprime > 0.0 && kprime < 1.0) {
            return Err(Error::Domain(format!("moduli k = {k}, k' = {kprime} must lie in (0, 1)")));
        }
        if (k * k + kprime * kprime - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("k² + k'² = {} differs from 1", k * k + kprime * kprime)));
        }
        let big_k = complete_k_from_complement(kprime);
        let big_kprime = complete_k_from_complement(k);
        let log_nome = PI * big_kprime / big_k;
        if log_nome < MIN_NOME_LOG {
            return Err(Error::Domain(format!("nome exp(-{log_nome}) too close to 1")));
        }
        let (theta2, theta3, theta4) = theta_constants((-log_nome).exp());
        Ok(Self { k, kprime, big_k, big_kprime, log_nome, theta2, theta3, theta4 })
    }

    /// The modulus with k and k' exchanged.
    pub fn complement(&self) -> Result<Self> {
        Self::from_pair(self.kprime, self.k)
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn kprime(&self) -> f64 {
        self.kprime
    }

    pub fn big_k(&self) -> f64 {
        self.big_k
    }

    pub fn big_kprime(&self) -> f64 {
        self.big_kprime
    }

    /// Period ratio τ = iK'/K.
    pub fn tau(&self) -> Complex64 {
        Complex64::new(0.0, self.big_kprime / self.big_k)
    }

    pub fn q(&self) -> f64 {
        (-self.log_nome).exp()
    }

    /// −ln q = πK'/K.
    pub fn log_nome(&self) -> f64 {
        self.log_nome
    }

    /// ϑ₂(0), ϑ₃(0), ϑ₄(0).
    pub fn theta_constants(&self) -> (f64, f64, f64) {
        (self.theta2, self.theta3, self.theta4)
    }

    /// ϑ_index(z) at this modulus' nome.
    pub fn theta(&self, index: ThetaIndex, z: Complex64) -> Result<Complex64> {
        theta_with_log_nome(index, z, self.log_nome)
    }

    /// Scale u ↦ ϑ₃⁻² u = πu/(2K) taking elliptic to theta arguments.
    pub fn to_theta_argument(&self, u: Complex64) -> Complex64 {
        u * (PI / (2.0 * self.big_k))
    }

    fn pole_distance(&self, u: Complex64) -> f64 {
        let w = u - Complex64::new(0.0, self.big_kprime);
        let a = (w.re / (2.0 * self.big_k)).round();
        let b = (w.im / (2.0 * self.big_kprime)).round();
        (w - Complex64::new(2.0 * a * self.big_k, 2.0 * b * self.big_kprime)).norm()
    }

    /// (sn u, cn u, dn u) for complex u.
    pub fn sn_cn_dn(&self, u: Complex64) -> Result<(Complex64, Complex64, Complex64)> {
        if !(u.re.is_finite() && u.im.is_finite()) {
            return Err(Error::Domain(format!("non-finite argument {u}")));
        }
        if self.pole_distance(u) < 1e-12 * self.big_k.max(self.big_kprime) {
            return Err(Error::PoleProximity(format!("{u}")));
        }
        let v = self.to_theta_argument(u);
        let t1 = self.theta(ThetaIndex::One, v)?;
        let t2 = self.theta(ThetaIndex::Two, v)?;
        let t3 = self.theta(ThetaIndex::Three, v)?;
        let t4 = self.theta(ThetaIndex::Four, v)?;
        let sn = self.theta3 / self.theta2 * t1 / t4;
        let cn = self.theta4 / self.theta2 * t2 / t4;
        let dn = self.theta4 / self.theta3 * t3 / t4;
        Ok((sn, cn, dn))
    }

    /// (sn u, cn u, dn u) for real u; real arguments never meet a pole.
    pub fn sn_cn_dn_real(&self, u: f64) -> (f64, f64, f64) {
        let (s, c, d) = self
            .sn_cn_dn(Complex64::new(u, 0.0))
            .expect("real arguments lie off the pole lattice");
        (s.re, c.re, d.re)
    }

    pub fn sn(&self, u: f64) -> f64 {
        self.sn_cn_dn_real(u).0
    }

    pub fn cn(&self, u: f64) -> f64 {
        self.sn_cn_dn_real(u).1
    }

    pub fn dn(&self, u: f64) -> f64 {
        self.sn_cn_dn_real(u).2
    }

    /// The u ∈ [−K, K] with sn u = s (so that cn u ≥ 0).
    pub fn inverse_sn(&self, s: f64) -> Result<f64> {
        if !(s.abs() <= 1.0) {
            return Err(Error::Domain(format!("inverse sn of {s} outside [-1, 1]")));
        }
        let s2 = s * s;
        Ok(s * carlson_rf(1.0 - s2, 1.0 - self.k * self.k * s2, 1.0)?)
    }
}

/// (sn u, cn u, dn u) for complex u at the given modulus.
pub fn jacobi_sn_cn_dn(u: Complex64, modulus: &EllipticModulus) -> Result<(Complex64, Complex64, Complex64)> {
    modulus.sn_cn_dn(u)
}

/// Real inverse of sn on [−K, K].
pub fn inverse_sn_real(s: f64, modulus: &EllipticModulus) -> Result<f64> {
    modulus.inverse_sn(s)
}
