//! Dispersion relation, b-coefficients, quasimomentum sectors and the
//! elliptic uniformization θ ↦ u_θ of the spectral curve.

use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex64;

use crate::elliptic::{EllipticModulus, ThetaIndex};
use crate::error::{Error, Result};

/// Smallest admissible K'/K; closer to criticality the theta series lose accuracy.
pub const MIN_PERIOD_RATIO: f64 = 1.0e-3;

/// Quasimomentum sector: antiperiodic θ = π(2j+1)/N or periodic θ = 2πj/N.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sector {
    Antiperiodic,
    Periodic,
}

impl Sector {
    /// Numerator of θ/(π/N) for index j.
    fn numerator(self, index: usize) -> usize {
        match self {
            Sector::Antiperiodic => 2 * index + 1,
            Sector::Periodic => 2 * index,
        }
    }

    pub fn label(self) -> char {
        match self {
            Sector::Antiperiodic => 'a',
            Sector::Periodic => 'p',
        }
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// A lattice quasimomentum stored exactly as (sector, index, N).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Momentum {
    pub sector: Sector,
    pub index: usize,
    pub n: usize,
}

impl Momentum {
    pub fn new(sector: Sector, index: usize, n: usize) -> Result<Self> {
        if n == 0 || index >= n {
            return Err(Error::InvalidState(format!("momentum index {index} out of range for N = {n}")));
        }
        Ok(Self { sector, index, n })
    }

    /// θ/(π/N) as an integer in [0, 2N).
    pub fn numerator(&self) -> usize {
        self.sector.numerator(self.index)
    }

    pub fn theta(&self) -> f64 {
        PI * self.numerator() as f64 / self.n as f64
    }
}

/// The ordered quasimomenta of a sector for lattice width n.
pub fn quasimomenta(sector: Sector, n: usize) -> Vec<f64> {
    (0..n).map(|j| PI * sector.numerator(j) as f64 / n as f64).collect()
}

/// A point of the spectral curve with the data attached to it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    pub theta: f64,
    pub gamma: f64,
    pub sinh_gamma: f64,
    pub b: Complex64,
    pub sqrt_b: Complex64,
    pub u: f64,
    pub nu: f64,
}

/// Lattice width and couplings together with every derived scalar, plus the
/// spectral data of both quasimomentum sectors.
#[derive(Debug, Clone)]
pub struct Couplings {
    n: usize,
    kx: f64,
    ky: f64,
    kx_star: f64,
    alpha: f64,
    beta: f64,
    s: f64,
    sinh_2kx: f64,
    sinh_2ky: f64,
    cosh_2ky: f64,
    sinh_2kx_star: f64,
    modulus: EllipticModulus,
    eta: f64,
    gamma_0: f64,
    gamma_pi: f64,
    gammas_a: Vec<f64>,
    gammas_p: Vec<f64>,
    antiperiodic: Vec<SpectralPoint>,
    periodic: Vec<SpectralPoint>,
}

impl Couplings {
    pub fn new(n: usize, kx: f64, ky: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("lattice width N must be positive".into()));
        }
        if !(kx.is_finite() && ky.is_finite() && kx > 0.0 && ky > 0.0) {
            return Err(Error::Domain(format!("couplings K_x = {kx}, K_y = {ky} must be positive and finite")));
        }
        let kx_star = (-2.0 * kx).exp().atanh();
        if !(kx_star < ky) {
            return Err(Error::NotFerromagnetic { kx_star, ky });
        }
        let sinh_2kx = (2.0 * kx).sinh();
        let sinh_2ky = (2.0 * ky).sinh();
        let s = sinh_2kx * sinh_2ky;
        let k = 1.0 / s;
        let kprime = ((s - 1.0) * (s + 1.0)).sqrt() / s;
        let modulus = EllipticModulus::from_pair(k, kprime).map_err(|_| Error::NearCritical {
            ratio: 0.0,
            limit: MIN_PERIOD_RATIO,
        })?;
        let ratio = modulus.big_kprime() / modulus.big_k();
        if ratio < MIN_PERIOD_RATIO {
            return Err(Error::NearCritical { ratio, limit: MIN_PERIOD_RATIO });
        }
        let t = kx_star.tanh();
        let mut c = Self {
            n,
            kx,
            ky,
            kx_star,
            alpha: t / ky.tanh(),
            beta: t * ky.tanh(),
            s,
            sinh_2kx,
            sinh_2ky,
            cosh_2ky: (2.0 * ky).cosh(),
            sinh_2kx_star: 1.0 / sinh_2kx,
            modulus,
            eta: 0.0,
            gamma_0: 2.0 * (ky - kx_star),
            gamma_pi: 2.0 * (ky + kx_star),
            gammas_a: Vec::new(),
            gammas_p: Vec::new(),
            antiperiodic: Vec::new(),
            periodic: Vec::new(),
        };
        c.eta = c.solve_eta()?;
        c.gammas_a = quasimomenta(Sector::Antiperiodic, n).iter().map(|&t| c.gamma(t)).collect();
        c.gammas_p = quasimomenta(Sector::Periodic, n).iter().map(|&t| c.gamma(t)).collect();
        c.antiperiodic = c.sector_points(Sector::Antiperiodic)?;
        c.periodic = c.sector_points(Sector::Periodic)?;
        Ok(c)
    }

    /// The same couplings on a lattice of a different width.
    pub fn with_width(&self, n: usize) -> Result<Self> {
        Self::new(n, self.kx, self.ky)
    }

    fn sector_points(&self, sector: Sector) -> Result<Vec<SpectralPoint>> {
        quasimomenta(sector, self.n).into_iter().map(|theta| self.point(theta)).collect()
    }

    fn solve_eta(&self) -> Result<f64> {
        // i sn(2iη, k) = sc(2|η|, k') = sinh 2K_x, i.e. sn(2|η|, k') = tanh 2K_x
        let complement = self.modulus.complement()?;
        let width = complement.inverse_sn((2.0 * self.kx).tanh())?;
        let eta = -0.5 * width;
        let residual = self.eta_residual(eta)?;
        if residual > 1e-10 * self.sinh_2kx.max(1.0) {
            return Err(Error::Convergence(format!("eta residual {residual:e}")));
        }
        Ok(eta)
    }

    fn eta_residual(&self, eta: f64) -> Result<f64> {
        let (sn, _, _) = self.modulus.sn_cn_dn(Complex64::new(0.0, 2.0 * eta))?;
        Ok((Complex64::new(self.sinh_2kx, 0.0) - Complex64::new(0.0, 1.0) * sn).norm())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kx(&self) -> f64 {
        self.kx
    }

    pub fn ky(&self) -> f64 {
        self.ky
    }

    pub fn kx_star(&self) -> f64 {
        self.kx_star
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// s = sinh 2K_x sinh 2K_y; the elliptic modulus is k = 1/s.
    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn modulus(&self) -> &EllipticModulus {
        &self.modulus
    }

    pub fn k(&self) -> f64 {
        self.modulus.k()
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// |sinh 2K_x − i sn 2iη| at the stored η.
    pub fn eta_check(&self) -> Result<f64> {
        self.eta_residual(self.eta)
    }

    pub fn sinh_2kx(&self) -> f64 {
        self.sinh_2kx
    }

    pub fn sinh_2ky(&self) -> f64 {
        self.sinh_2ky
    }

    pub fn sinh_2kx_star(&self) -> f64 {
        self.sinh_2kx_star
    }

    /// ρ = √(sinh 2K_y / sinh 2K_x).
    pub fn rho(&self) -> f64 {
        (self.sinh_2ky / self.sinh_2kx).sqrt()
    }

    /// ξ = (1 − k²)^{1/4}; the infinite-lattice magnetization is √ξ.
    pub fn xi(&self) -> f64 {
        let k = self.k();
        ((1.0 - k) * (1.0 + k)).powf(0.25)
    }

    /// The infinite-lattice spontaneous magnetization (1 − s⁻²)^{1/8}.
    pub fn yang_magnetization(&self) -> f64 {
        self.xi().sqrt()
    }

    pub fn gamma_0(&self) -> f64 {
        self.gamma_0
    }

    pub fn gamma_pi(&self) -> f64 {
        self.gamma_pi
    }

    /// γ_θ ≥ 0 from cosh γ_θ − 1 = 2 sinh²(K_y − K*_x) + 2 sinh 2K*_x sinh 2K_y sin²(θ/2).
    pub fn gamma(&self, theta: f64) -> f64 {
        let half = (0.5 * theta).sin();
        let x = 2.0 * (self.ky - self.kx_star).sinh().powi(2)
            + 2.0 * self.sinh_2kx_star * self.sinh_2ky * half * half;
        (x + (x * (2.0 + x)).sqrt()).ln_1p()
    }

    /// √b_θ, the root of positive real part.
    pub fn sqrt_b(&self, theta: f64) -> Result<Complex64> {
        let e = Complex64::from_polar(1.0, theta);
        let num = (1.0 - self.alpha * e) * (1.0 - self.beta * e.conj());
        if !(num.re > 0.0) {
            return Err(Error::BranchCut(format!("b at theta = {theta}")));
        }
        Ok(Complex64::from_polar(1.0, 0.5 * num.arg()))
    }

    pub fn b(&self, theta: f64) -> Result<Complex64> {
        self.sqrt_b(theta).map(|r| r * r)
    }

    /// u_θ ∈ [−K, K), with u_θ < 0 for θ < π.
    pub fn u(&self, theta: f64) -> f64 {
        let theta = theta.rem_euclid(TAU);
        let gamma = self.gamma(theta);
        let (sn, cn, dn) = self.sn_cn_dn_of_theta(theta, gamma);
        sn * crate::elliptic::carlson_rf(cn * cn, dn * dn, 1.0).expect("dn u_θ > 0")
    }

    /// (sn u_θ, cn u_θ, dn u_θ) from the trigonometric parametrization.
    pub fn sn_cn_dn_of_theta(&self, theta: f64, gamma: f64) -> (f64, f64, f64) {
        let sh_pi = (0.5 * (self.gamma_pi + gamma)).sinh();
        let sh_0 = (0.5 * (self.gamma_0 + gamma)).sinh();
        let sinh_gamma_pi = self.gamma_pi.sinh();
        let sn = -self.sinh_2ky * (0.5 * theta).cos() / sh_pi;
        let cn = (0.5 * theta).sin() * (self.sinh_2ky * sinh_gamma_pi / (sh_0 * sh_pi)).sqrt();
        let dn = (sinh_gamma_pi * sh_0 / (self.sinh_2ky * sh_pi)).sqrt();
        (sn, cn, dn)
    }

    /// ν_θ = Σ_{θ'∈a} ln sinh((γ_θ+γ_θ')/2) − Σ_{θ'∈p} ln sinh((γ_θ+γ_θ')/2).
    pub fn nu(&self, theta: f64) -> f64 {
        self.nu_from_gamma(self.gamma(theta))
    }

    fn nu_from_gamma(&self, gamma: f64) -> f64 {
        self.gammas_a
            .iter()
            .zip(&self.gammas_p)
            .map(|(&ga, &gp)| ((0.5 * (gamma + ga)).sinh() / (0.5 * (gamma + gp)).sinh()).ln())
            .sum()
    }

    fn point_without_nu(&self, theta: f64) -> Result<SpectralPoint> {
        let gamma = self.gamma(theta);
        let sqrt_b = self.sqrt_b(theta)?;
        Ok(SpectralPoint {
            theta,
            gamma,
            sinh_gamma: gamma.sinh(),
            b: sqrt_b * sqrt_b,
            sqrt_b,
            u: self.u(theta),
            nu: 0.0,
        })
    }

    /// Spectral data at an arbitrary θ.
    pub fn point(&self, theta: f64) -> Result<SpectralPoint> {
        let mut p = self.point_without_nu(theta)?;
        p.nu = self.nu_from_gamma(p.gamma);
        Ok(p)
    }

    /// Spectral data of every quasimomentum of a sector, in ascending order.
    pub fn points(&self, sector: Sector) -> &[SpectralPoint] {
        match sector {
            Sector::Antiperiodic => &self.antiperiodic,
            Sector::Periodic => &self.periodic,
        }
    }

    pub fn point_of(&self, m: Momentum) -> &SpectralPoint {
        debug_assert_eq!(m.n, self.n);
        &self.points(m.sector)[m.index]
    }

    /// ξ_T = Π_p e^{ν/4} Π_a e^{−ν/4}.
    pub fn xi_t(&self) -> f64 {
        let p: f64 = self.periodic.iter().map(|p| p.nu).sum();
        let a: f64 = self.antiperiodic.iter().map(|p| p.nu).sum();
        (0.25 * (p - a)).exp()
    }

    /// Elliptic form of √b at parameter u: (dn u + ik sn u cn u)/√(1 − k² sn⁴u).
    pub fn b_elliptic(&self, u: f64) -> Complex64 {
        let k = self.k();
        let (sn, cn, dn) = self.modulus.sn_cn_dn_real(u);
        Complex64::new(dn, k * sn * cn) / (1.0 - k * k * sn.powi(4)).sqrt()
    }

    /// The uniformizing pair (z(u), λ(u)) = (sn(u+iη)/sn(u−iη), [k sn(u+iη) sn(u−iη)]⁻¹).
    pub fn curve_point(&self, u: Complex64) -> Result<(Complex64, Complex64)> {
        let shift = Complex64::new(0.0, self.eta);
        let (sp, _, _) = self.modulus.sn_cn_dn(u + shift)?;
        let (sm, _, _) = self.modulus.sn_cn_dn(u - shift)?;
        Ok((sp / sm, 1.0 / (self.k() * sp * sm)))
    }

    /// Residual of sinh 2K_x (λ+λ⁻¹)/2 + sinh 2K_y (z+z⁻¹)/2 = cosh 2K_x cosh 2K_y.
    pub fn curve_residual(&self, z: Complex64, lambda: Complex64) -> f64 {
        let lhs = self.sinh_2kx * (lambda + 1.0 / lambda) / 2.0 + self.sinh_2ky * (z + 1.0 / z) / 2.0;
        (lhs - (2.0 * self.kx).cosh() * self.cosh_2ky).norm()
    }

    /// Theta-function argument x = ϑ₃⁻² u_θ.
    pub fn theta_argument(&self, theta: f64) -> f64 {
        self.modulus.to_theta_argument(Complex64::new(self.u(theta), 0.0)).re
    }

    /// ϑ₁ at this modulus' nome.
    pub fn theta1(&self, z: Complex64) -> Result<Complex64> {
        self.modulus.theta(ThetaIndex::One, z)
    }
}

/// γ_θ for the given couplings.
pub fn gamma_of_theta(theta: f64, c: &Couplings) -> f64 {
    c.gamma(theta)
}

/// b_θ for the given couplings.
pub fn b_of_theta(theta: f64, c: &Couplings) -> Result<Complex64> {
    c.b(theta)
}

/// u_θ for the given couplings.
pub fn u_of_theta(theta: f64, c: &Couplings) -> f64 {
    c.u(theta)
}

/// √b at elliptic parameter u.
pub fn b_elliptic(u: f64, c: &Couplings) -> Complex64 {
    c.b_elliptic(u)
}

/// η ∈ (−K'/2, 0) with sinh 2K_x = i sn 2iη.
pub fn eta_of_couplings(kx: f64, ky: f64) -> Result<f64> {
    Ok(Couplings::new(1, kx, ky)?.eta())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn sector_momenta() {
        assert_eq!(quasimomenta(Sector::Periodic, 1), vec![0.0]);
        let a = quasimomenta(Sector::Antiperiodic, 2);
        assert!(close(a[0], PI / 2.0, 1e-15) && close(a[1], 1.5 * PI, 1e-15));
        let p = quasimomenta(Sector::Periodic, 4);
        assert_eq!(p.len(), 4);
        assert!(close(p[3], 1.5 * PI, 1e-15));
        assert!(Momentum::new(Sector::Periodic, 4, 4).is_err());
    }

    #[test]
    fn rejects_bad_couplings() {
        assert!(matches!(Couplings::new(4, 0.2, 0.2), Err(Error::NotFerromagnetic { .. })));
        assert!(Couplings::new(0, 0.5, 0.5).is_err());
        assert!(Couplings::new(4, -0.1, 0.5).is_err());
        assert!(matches!(Couplings::new(4, 0.440_686_793_509_771_5, 0.440_686_793_509_771_5), Err(Error::NearCritical { .. }) | Err(Error::NotFerromagnetic { .. })));
    }

    #[test]
    fn gamma_endpoints() {
        let c = Couplings::new(3, 0.4, 0.6).unwrap();
        assert!(close(c.gamma(0.0), 2.0 * (0.6 - c.kx_star()), 1e-14));
        assert!(close(c.gamma(PI), 2.0 * (0.6 + c.kx_star()), 1e-14));
        let direct = ((2.0 * c.kx_star()).cosh() * (1.2f64).cosh()).acosh();
        assert!(close(c.gamma(PI / 2.0), direct, 1e-13));
    }

    #[test]
    fn b_values() {
        let c = Couplings::new(3, 0.4, 0.7).unwrap();
        assert!((c.b(PI).unwrap() - 1.0).norm() < 1e-15);
        assert!((c.b(0.0).unwrap() - 1.0).norm() < 1e-15);
        for &t in &[0.3, 1.7, 2.9, 4.4] {
            let prod = c.b(t).unwrap() * c.b(TAU - t).unwrap();
            assert!((prod - 1.0).norm() < 1e-14);
            assert!((c.b(t).unwrap().norm() - 1.0).abs() < 1e-14);
            assert!((c.b_elliptic(c.u(t)) - c.sqrt_b(t).unwrap()).norm() < 1e-12);
        }
    }

    #[test]
    fn u_endpoints_and_reflection() {
        let c = Couplings::new(3, 0.4, 0.7).unwrap();
        let big_k = c.modulus().big_k();
        assert!(close(c.u(0.0), -big_k, 1e-14));
        assert!(c.u(PI).abs() < 1e-15);
        for &t in &[0.4, 1.3, 2.8] {
            assert!(close(c.u(TAU - t), -c.u(t), 1e-14));
            assert!(c.u(t) < 0.0);
            let (sn, cn, dn) = c.modulus().sn_cn_dn_real(c.u(t));
            let (sn0, cn0, dn0) = c.sn_cn_dn_of_theta(t, c.gamma(t));
            assert!(close(sn, sn0, 1e-12) && close(cn, cn0, 1e-12) && close(dn, dn0, 1e-12));
        }
    }

    #[test]
    fn eta_solves_defining_relation() {
        let c = Couplings::new(1, 0.4, 0.7).unwrap();
        assert!(c.eta_check().unwrap() < 1e-11);
        assert!(c.eta() < 0.0 && c.eta() > -c.modulus().big_kprime() / 2.0);
        let small = eta_of_couplings(0.05, 3.0).unwrap();
        assert!(small < 0.0 && small > -0.2);
    }

    #[test]
    fn uniformization_lies_on_curve() {
        let c = Couplings::new(1, 0.4, 0.7).unwrap();
        for i in 0..20 {
            let u = Complex64::new(-c.modulus().big_k() + 0.1 * i as f64, 0.05 * i as f64 - 0.4);
            let (z, lam) = c.curve_point(u).unwrap();
            assert!(c.curve_residual(z, lam) < 1e-10 * lam.norm().max(1.0 / lam.norm()));
        }
    }

    #[test]
    fn nu_single_site() {
        let c = Couplings::new(1, 0.4, 0.7).unwrap();
        let t = 1.1;
        let g = c.gamma(t);
        let expected = ((0.5 * (g + c.gamma_pi())).sinh() / (0.5 * (g + c.gamma_0())).sinh()).ln();
        assert!(close(c.nu(t), expected, 1e-14));
    }
}
