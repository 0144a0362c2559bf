use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::elliptic::{theta, EllipticModulus, ThetaIndex};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, SkewMatrix};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const LATTICE_TOL: f64 = 1.0e-13;

/// Points x_i, y_i and shift α of an elliptic Cauchy (Frobenius) matrix
/// ϑ₁(x_i − y_j + α)/(ϑ₁(x_i − y_j) ϑ₁(α)) at nome q.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipticPointConfig {
    pub xs: Vec<Complex64>,
    pub ys: Vec<Complex64>,
    pub q: f64,
    pub alpha: Complex64,
}

impl EllipticPointConfig {
    pub fn new(xs: Vec<Complex64>, ys: Vec<Complex64>, q: f64, alpha: Complex64) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::Precondition(format!("{} x-points but {} y-points", xs.len(), ys.len())));
        }
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::Domain(format!("nome q = {q} must lie in (0, 1)")));
        }
        let cfg = Self { xs, ys, q, alpha };
        for x in &cfg.xs {
            for y in &cfg.ys {
                if cfg.on_zero_lattice(x - y) {
                    return Err(Error::Precondition(format!("x - y = {} lies on the theta zero lattice", x - y)));
                }
            }
        }
        if cfg.on_zero_lattice(alpha) {
            return Err(Error::Domain(format!("theta_1(alpha) vanishes at alpha = {alpha}")));
        }
        Ok(cfg)
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    fn log_nome(&self) -> f64 {
        -self.q.ln()
    }

    fn on_zero_lattice(&self, z: Complex64) -> bool {
        on_zero_lattice(z, self.log_nome())
    }

    fn th1(&self, z: Complex64) -> Result<Complex64> {
        theta(ThetaIndex::One, z, self.q)
    }

    fn imbalance(&self) -> Complex64 {
        self.xs.iter().sum::<Complex64>() - self.ys.iter().sum::<Complex64>()
    }
}

/// True when z is within tolerance of mπ + nπτ, the zeros of ϑ₁.
pub(crate) fn on_zero_lattice(z: Complex64, log_nome: f64) -> bool {
    let n = (z.im / log_nome).round();
    let m = ((z.re) / std::f64::consts::PI).round();
    (z - Complex64::new(m * std::f64::consts::PI, n * log_nome)).norm() < LATTICE_TOL
}

/// Pairwise ϑ₁ tables shared by the closed-form determinants and inverses.
pub(crate) struct PairTables {
    /// ϑ₁(x_i − y_j)
    pub xy: Vec<Vec<Complex64>>,
    /// Π_j ϑ₁(x_n − y_j) / Π_{j≠n} ϑ₁(x_n − x_j)
    pub x_ratio: Vec<Complex64>,
    /// Π_j ϑ₁(y_m − x_j) / Π_{j≠m} ϑ₁(y_m − y_j)
    pub y_ratio: Vec<Complex64>,
    /// Π_{i<j} ϑ₁(x_i − x_j) ϑ₁(y_j − y_i) / Π_{i,j} ϑ₁(x_i − y_j)
    pub cauchy: Complex64,
}

impl PairTables {
    pub fn new(xs: &[Complex64], ys: &[Complex64], th1: &dyn Fn(Complex64) -> Result<Complex64>) -> Result<Self> {
        let n = xs.len();
        let mut xy = vec![vec![Complex64::new(0.0, 0.0); n]; n];
        let mut xx = vec![vec![Complex64::new(0.0, 0.0); n]; n];
        let mut yy = vec![vec![Complex64::new(0.0, 0.0); n]; n];
        for i in 0..n {
            for j in 0..n {
                xy[i][j] = th1(xs[i] - ys[j])?;
                if i != j {
                    xx[i][j] = th1(xs[i] - xs[j])?;
                    yy[i][j] = th1(ys[i] - ys[j])?;
                }
            }
        }
        let mut x_ratio = Vec::with_capacity(n);
        let mut y_ratio = Vec::with_capacity(n);
        for a in 0..n {
            let mut rx = Complex64::new(1.0, 0.0);
            let mut ry = Complex64::new(1.0, 0.0);
            for j in 0..n {
                // ϑ₁ is odd: ϑ₁(y_m − x_j) = −ϑ₁(x_j − y_m)
                rx *= xy[a][j];
                ry *= -xy[j][a];
                if j != a {
                    rx /= xx[a][j];
                    ry /= yy[a][j];
                }
            }
            x_ratio.push(rx);
            y_ratio.push(ry);
        }
        let mut cauchy = Complex64::new(1.0, 0.0);
        for i in 0..n {
            for j in i + 1..n {
                cauchy *= xx[i][j] * yy[j][i];
            }
            for j in 0..n {
                cauchy /= xy[i][j];
            }
        }
        Ok(Self { xy, x_ratio, y_ratio, cauchy })
    }
}

/// Dense elliptic Cauchy matrix.
pub fn frobenius_matrix(cfg: &EllipticPointConfig) -> Result<CMatrix> {
    let n = cfg.len();
    let th_alpha = cfg.th1(cfg.alpha)?;
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let d = cfg.xs[i] - cfg.ys[j];
            m[(i, j)] = cfg.th1(d + cfg.alpha)? / (cfg.th1(d)? * th_alpha);
        }
    }
    Ok(m)
}

/// Closed-form determinant of the elliptic Cauchy matrix.
pub fn frobenius_det(cfg: &EllipticPointConfig) -> Result<Complex64> {
    let th1 = |z| cfg.th1(z);
    let tables = PairTables::new(&cfg.xs, &cfg.ys, &th1)?;
    Ok(cfg.th1(cfg.imbalance() + cfg.alpha)? / cfg.th1(cfg.alpha)? * tables.cauchy)
}

/// Closed-form inverse of the elliptic Cauchy matrix.
pub fn frobenius_inverse(cfg: &EllipticPointConfig) -> Result<CMatrix> {
    let s = cfg.imbalance();
    if cfg.on_zero_lattice(s + cfg.alpha) {
        return Err(Error::Singular(0.0));
    }
    let th1 = |z| cfg.th1(z);
    let t = PairTables::new(&cfg.xs, &cfg.ys, &th1)?;
    let denom = cfg.th1(s + cfg.alpha)?;
    let n = cfg.len();
    let mut inv = CMatrix::zeros(n, n);
    for m in 0..n {
        for nn in 0..n {
            let shifted = cfg.th1(s - cfg.xs[nn] + cfg.ys[m] + cfg.alpha)?;
            inv[(m, nn)] = -shifted / (denom * t.xy[nn][m]) * t.x_ratio[nn] * t.y_ratio[m];
        }
    }
    Ok(inv)
}

/// The individual terms Π_j ϑ₁(z_i − z'_j) / Π_{j≠i} ϑ₁(z_i − z_j) of the
/// balanced interpolation sum.
pub fn theta_interpolation_terms(zs: &[Complex64], zs_prime: &[Complex64], q: f64) -> Result<Vec<Complex64>> {
    if zs.len() != zs_prime.len() || zs.is_empty() {
        return Err(Error::Precondition("interpolation needs two non-empty lists of equal length".into()));
    }
    let imbalance = zs.iter().sum::<Complex64>() - zs_prime.iter().sum::<Complex64>();
    let scale = zs.iter().chain(zs_prime).map(|z| z.norm()).fold(1.0, f64::max);
    if imbalance.norm() > 1e-12 * scale {
        return Err(Error::Precondition(format!("interpolation points unbalanced by {}", imbalance.norm())));
    }
    let th1 = |z| theta(ThetaIndex::One, z, q);
    let mut terms = Vec::with_capacity(zs.len());
    for (i, zi) in zs.iter().enumerate() {
        let mut t = Complex64::new(1.0, 0.0);
        for (j, (zj, zpj)) in zs.iter().zip(zs_prime).enumerate() {
            t *= th1(zi - zpj)?;
            if j != i {
                t /= th1(zi - zj)?;
            }
        }
        terms.push(t);
    }
    Ok(terms)
}

/// Σ_i Π_j ϑ₁(z_i − z'_j) / Π_{j≠i} ϑ₁(z_i − z_j), which vanishes for balanced input.
pub fn theta_interpolation_sum(zs: &[Complex64], zs_prime: &[Complex64], q: f64) -> Result<Complex64> {
    Ok(theta_interpolation_terms(zs, zs_prime, q)?.iter().sum())
}

/// The skew matrix √k sn(u_i − u_j).
pub fn sn_skew_matrix(us: &[f64], modulus: &EllipticModulus) -> SkewMatrix {
    let sk = modulus.k().sqrt();
    SkewMatrix::from_upper(us.len(), |i, j| Complex64::new(sk * modulus.sn(us[i] - us[j]), 0.0))
}

/// Π_{i<j} √k sn(u_i − u_j), the pfaffian of [`sn_skew_matrix`].
pub fn sn_pfaffian_product(us: &[f64], modulus: &EllipticModulus) -> Result<Complex64> {
    if us.len() % 2 == 1 {
        return Err(Error::Precondition(format!("sn pfaffian needs an even number of points, got {}", us.len())));
    }
    let sk = modulus.k().sqrt();
    let mut p = 1.0;
    for i in 0..us.len() {
        for j in i + 1..us.len() {
            p *= sk * modulus.sn(us[i] - us[j]);
        }
    }
    Ok(Complex64::new(p, 0.0))
}

/// det(√k sn(u_i − u_j)) = (Π_{i<j} √k sn(u_i − u_j))², even sizes only.
pub fn sn_determinant(us: &[f64], modulus: &EllipticModulus) -> Result<Complex64> {
    sn_pfaffian_product(us, modulus).map(|p| p * p)
}

/// Elliptic-function Cauchy matrices dn(u_i − v_j)/sn(u_i − v_j), cn(u_i − v_j)
/// and their closed-form determinant, inverse and products.
#[derive(Debug, Clone)]
pub struct DnSnCauchy<'a> {
    modulus: &'a EllipticModulus,
    us: Vec<f64>,
    vs: Vec<f64>,
    xs: Vec<Complex64>,
    ys: Vec<Complex64>,
}

impl<'a> DnSnCauchy<'a> {
    pub fn new(us: &[f64], vs: &[f64], modulus: &'a EllipticModulus) -> Result<Self> {
        if us.len() != vs.len() {
            return Err(Error::Precondition("u and v lists differ in length".into()));
        }
        let scale = |u: f64| modulus.to_theta_argument(Complex64::new(u, 0.0));
        let xs: Vec<Complex64> = us.iter().map(|&u| scale(u)).collect();
        let ys: Vec<Complex64> = vs.iter().map(|&v| scale(v)).collect();
        for x in &xs {
            for y in &ys {
                if on_zero_lattice(x - y, modulus.log_nome()) {
                    return Err(Error::Precondition("coincident u and v points".into()));
                }
            }
        }
        Ok(Self { modulus, us: us.to_vec(), vs: vs.to_vec(), xs, ys })
    }

    pub fn xs(&self) -> &[Complex64] {
        &self.xs
    }

    pub fn ys(&self) -> &[Complex64] {
        &self.ys
    }

    fn th1(&self, z: Complex64) -> Result<Complex64> {
        self.modulus.theta(ThetaIndex::One, z)
    }

    fn pi_tau(&self) -> Complex64 {
        Complex64::new(0.0, self.modulus.log_nome())
    }

    fn imbalance(&self) -> Complex64 {
        self.xs.iter().sum::<Complex64>() - self.ys.iter().sum::<Complex64>()
    }

    fn tables(&self) -> Result<PairTables> {
        let th1 = |z| self.th1(z);
        PairTables::new(&self.xs, &self.ys, &th1)
    }

    /// Φ_ij = dn(u_i − v_j)/sn(u_i − v_j).
    pub fn phi(&self) -> CMatrix {
        let n = self.us.len();
        CMatrix::from_fn(n, n, |i, j| {
            let (s, _, d) = self.modulus.sn_cn_dn_real(self.us[i] - self.vs[j]);
            Complex64::new(d / s, 0.0)
        })
    }

    /// Ψ_ij = cn(u_i − v_j).
    pub fn psi(&self) -> CMatrix {
        let n = self.us.len();
        CMatrix::from_fn(n, n, |i, j| Complex64::new(self.modulus.cn(self.us[i] - self.vs[j]), 0.0))
    }

    /// det Φ in theta-function form.
    pub fn det_phi(&self) -> Result<Complex64> {
        let n = self.us.len() as i32;
        let (t2, t3, t4) = self.modulus.theta_constants();
        let s = self.imbalance();
        let pt = self.pi_tau();
        let pre = t2.powi(n) * t4.powi(n) / t3.powi(n + 1);
        let phase = (-I * (s - pt / 4.0)).exp();
        Ok(pre * phase * self.th1(s + FRAC_PI_2 - pt / 2.0)? * self.tables()?.cauchy)
    }

    /// Φ⁻¹ in theta-function form; rows indexed by v, columns by u.
    pub fn phi_inverse(&self) -> Result<CMatrix> {
        let (t2, t3, t4) = self.modulus.theta_constants();
        let s = self.imbalance();
        let pt = self.pi_tau();
        let shift = FRAC_PI_2 - pt / 2.0;
        if on_zero_lattice(s + shift, self.modulus.log_nome()) {
            return Err(Error::Singular(0.0));
        }
        let t = self.tables()?;
        let denom = self.th1(s + shift)?;
        let n = self.us.len();
        let mut inv = CMatrix::zeros(n, n);
        for m in 0..n {
            for nn in 0..n {
                let phase = (I * (self.xs[nn] - self.ys[m])).exp();
                let num = self.th1(s - self.xs[nn] + self.ys[m] + shift)?;
                inv[(m, nn)] = -t3 / (t2 * t4) * phase * num / (denom * t.xy[nn][m]) * t.x_ratio[nn] * t.y_ratio[m];
            }
        }
        Ok(inv)
    }

    /// ΨΦ⁻¹ in theta-function form, indexed by (u, u).
    pub fn psi_phi_inverse(&self) -> Result<CMatrix> {
        let (t2, t3, _) = self.modulus.theta_constants();
        let s = self.imbalance();
        let pt = self.pi_tau();
        let denom = self.th1(s + FRAC_PI_2 - pt / 2.0)?;
        let t = self.tables()?;
        let n = self.us.len();
        let mut out = CMatrix::zeros(n, n);
        for l in 0..n {
            // Π_i ϑ₁(x_l − x_i + πτ/2) over i ≠ n is assembled per column below
            let mut shifted_y = Complex64::new(1.0, 0.0);
            for y in &self.ys {
                shifted_y *= self.th1(self.xs[l] - y + pt / 2.0)?;
            }
            let shifted_x: Vec<Complex64> =
                self.xs.iter().map(|x| self.th1(self.xs[l] - x + pt / 2.0)).collect::<Result<_>>()?;
            for nn in 0..n {
                let phase = I * (I * (self.xs[nn] - self.xs[l] - pt / 2.0)).exp() * (t3 * t3 / (t2 * t2));
                let num = self.th1(self.xs[l] - self.xs[nn] + s + FRAC_PI_2)?;
                let mut prod = t.x_ratio[nn] / shifted_y;
                for (i, sx) in shifted_x.iter().enumerate() {
                    if i != nn {
                        prod *= sx;
                    }
                }
                out[(l, nn)] = phase * num / denom * prod;
            }
        }
        Ok(out)
    }

    /// Φ⁻¹Ψ in theta-function form, indexed by (v, v).
    pub fn phi_inverse_psi(&self) -> Result<CMatrix> {
        let (t2, t3, _) = self.modulus.theta_constants();
        let s = self.imbalance();
        let pt = self.pi_tau();
        let denom = self.th1(s + FRAC_PI_2 - pt / 2.0)?;
        let t = self.tables()?;
        let n = self.us.len();
        let mut out = CMatrix::zeros(n, n);
        for l in 0..n {
            let mut shifted_x = Complex64::new(1.0, 0.0);
            for x in &self.xs {
                shifted_x *= self.th1(self.ys[l] - x - pt / 2.0)?;
            }
            let shifted_y: Vec<Complex64> =
                self.ys.iter().map(|y| self.th1(self.ys[l] - y - pt / 2.0)).collect::<Result<_>>()?;
            for m in 0..n {
                let phase = I * (I * (self.ys[l] - self.ys[m] - pt / 2.0)).exp() * (t3 * t3 / (t2 * t2));
                let num = self.th1(self.ys[m] - self.ys[l] + s + FRAC_PI_2)?;
                let mut prod = t.y_ratio[m] / shifted_x;
                for (i, sy) in shifted_y.iter().enumerate() {
                    if i != m {
                        prod *= sy;
                    }
                }
                out[(m, l)] = phase * num / denom * prod;
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{det_and_inverse, determinant, max_abs_diff, pfaffian};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_config(n: usize, rng: &mut ChaCha8Rng) -> EllipticPointConfig {
        let q = rng.gen_range(0.05..0.5);
        let l = -f64::ln(q);
        let mut pick = |offset: f64| {
            (0..n)
                .map(|i| {
                    let re = std::f64::consts::PI * (i as f64 + offset + rng.gen_range(-0.2..0.2)) / n as f64;
                    Complex64::new(re, rng.gen_range(-0.2..0.2) * l)
                })
                .collect::<Vec<_>>()
        };
        let xs = pick(0.0);
        let ys = pick(0.5);
        let alpha = Complex64::new(rng.gen_range(0.2..1.2), rng.gen_range(-0.3..0.3) * l);
        EllipticPointConfig::new(xs, ys, q, alpha).unwrap()
    }

    #[test]
    fn single_entry() {
        let cfg = EllipticPointConfig::new(vec![Complex64::new(0.4, 0.1)], vec![Complex64::new(-0.3, 0.0)], 0.3, Complex64::new(0.7, 0.0)).unwrap();
        let m = frobenius_matrix(&cfg).unwrap();
        assert!((frobenius_det(&cfg).unwrap() - m[(0, 0)]).norm() < 1e-14);
        assert!((frobenius_inverse(&cfg).unwrap()[(0, 0)] - 1.0 / m[(0, 0)]).norm() < 1e-13);
    }

    #[test]
    fn det_and_inverse_match_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for n in 2..=6 {
            let cfg = random_config(n, &mut rng);
            let m = frobenius_matrix(&cfg).unwrap();
            let det = determinant(&m).unwrap();
            assert!((frobenius_det(&cfg).unwrap() - det).norm() < 1e-10 * det.norm());
            let (_, inv) = det_and_inverse(&m).unwrap();
            let closed = frobenius_inverse(&cfg).unwrap();
            let scale = inv.iter().map(|z| z.norm()).fold(1.0, f64::max);
            assert!(max_abs_diff(&closed, &inv) < 1e-10 * scale);
        }
    }

    #[test]
    fn equal_rows_give_zero_determinant() {
        let x = Complex64::new(0.3, 0.05);
        let cfg = EllipticPointConfig::new(vec![x, x], vec![Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.1)], 0.2, Complex64::new(0.5, 0.0)).unwrap();
        assert!(frobenius_det(&cfg).unwrap().norm() < 1e-15);
    }

    #[test]
    fn interpolation_vanishes_when_balanced() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for m in 1..=6 {
            let q = 0.3;
            let mut zs: Vec<Complex64> = (0..m).map(|_| Complex64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-0.3..0.3))).collect();
            let mut zp: Vec<Complex64> = (0..m).map(|_| Complex64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-0.3..0.3))).collect();
            if m == 1 {
                zs[0] = zp[0];
            } else {
                let shift = zs.iter().sum::<Complex64>() - zp.iter().sum::<Complex64>();
                zp[m - 1] += shift;
            }
            zs.truncate(m);
            let terms = theta_interpolation_terms(&zs, &zp, q).unwrap();
            let scale: f64 = terms.iter().map(|t| t.norm()).sum();
            let sum: Complex64 = terms.iter().sum();
            assert!(sum.norm() <= 1e-10 * scale.max(1e-300) || sum.norm() == 0.0, "M = {m}");
        }
        let bad = theta_interpolation_sum(&[Complex64::new(0.1, 0.0)], &[Complex64::new(0.2, 0.0)], 0.3);
        assert!(matches!(bad, Err(Error::Precondition(_))));
    }

    #[test]
    fn sn_pfaffian_examples() {
        let m = EllipticModulus::new(0.7).unwrap();
        let us = [0.3, -0.8];
        let p = sn_pfaffian_product(&us, &m).unwrap();
        assert!((p - pfaffian(&sn_skew_matrix(&us, &m))).norm() < 1e-15);
        let us = [0.3, -0.8, 1.1, 0.05];
        let p = sn_pfaffian_product(&us, &m).unwrap();
        assert!((p - pfaffian(&sn_skew_matrix(&us, &m))).norm() < 1e-12 * p.norm());
        assert_eq!(sn_pfaffian_product(&[0.2, 0.2], &m).unwrap().norm(), 0.0);
        assert!(sn_pfaffian_product(&[0.1, 0.2, 0.3], &m).is_err());
        let det = determinant(sn_skew_matrix(&us, &m).entries()).unwrap();
        assert!((sn_determinant(&us, &m).unwrap() - det).norm() < 1e-12 * det.norm());
    }

    #[test]
    fn dn_sn_closed_forms_match_dense() {
        let m = EllipticModulus::new(0.6).unwrap();
        let us = [0.1, -0.9, 1.3, 0.6];
        let vs = [-0.4, 0.45, 1.0, -1.5];
        let c = DnSnCauchy::new(&us, &vs, &m).unwrap();
        let phi = c.phi();
        let psi = c.psi();
        let (det, inv) = det_and_inverse(&phi).unwrap();
        assert!((c.det_phi().unwrap() - det).norm() < 1e-10 * det.norm());
        assert!(max_abs_diff(&c.phi_inverse().unwrap(), &inv) < 1e-10);
        assert!(max_abs_diff(&c.psi_phi_inverse().unwrap(), &(&psi * &inv)) < 1e-10);
        assert!(max_abs_diff(&c.phi_inverse_psi().unwrap(), &(&inv * &psi)) < 1e-10);
    }
}
