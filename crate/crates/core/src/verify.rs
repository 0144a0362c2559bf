//! Formula-versus-formula identity suites, runnable on demand.
//!
//! Every check reports the largest residual seen over its samples. Residuals
//! are |lhs − rhs| / max(1, |rhs|) unless the check name says `relative`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cauchy::{self, EllipticPointConfig};
use crate::elliptic::EllipticModulus;
use crate::error::{Error, Result};
use crate::formfactors::{
    elliptic_pairing_matrix, ff_closed, ff_pfaffian_with, pairing_matrix, vacuum_overlap, FormFactorSpec,
    InducedRotation, TwoParticleMatrices,
};
use crate::linalg::{det_and_inverse, determinant, max_abs_diff, max_scaled_diff, pfaffian, CMatrix};
use crate::spectral::{quasimomenta, Couplings, Sector};

pub const DEFAULT_TOLERANCE: f64 = 1.0e-10;
/// Random points per elliptic identity.
pub const ELLIPTIC_SAMPLES: usize = 128;
/// Random elliptic Cauchy configurations in the cauchy suite.
pub const FROBENIUS_CONFIGS: usize = 50;
/// Largest sn pfaffian checked by the cauchy suite; see [`sn_pfaffian_checks`].
pub const SUITE_PFAFFIAN_SIZE: usize = 6;
const SEED: u64 = 0x1515_f0f0;
/// Keeps random pairs away from the poles of the checked quotients.
const POLE_MARGIN: f64 = 0.05;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Elliptic,
    Cauchy,
    Rotation,
    FormFactor,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Elliptic => "elliptic",
            Suite::Cauchy => "cauchy",
            Suite::Rotation => "rotation",
            Suite::FormFactor => "formfactor",
            Suite::All => "all",
        }
    }

    /// The concrete suites this one runs.
    pub fn members(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![Suite::Elliptic, Suite::Cauchy, Suite::Rotation, Suite::FormFactor],
            s => vec![s],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "elliptic" => Ok(Suite::Elliptic),
            "cauchy" => Ok(Suite::Cauchy),
            "rotation" => Ok(Suite::Rotation),
            "formfactor" => Ok(Suite::FormFactor),
            "all" => Ok(Suite::All),
            other => Err(Error::Domain(format!("unknown suite '{other}'"))),
        }
    }
}

/// One named identity and the worst residual over its samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub max_residual: f64,
    pub samples: usize,
}

impl Check {
    pub fn passed(&self, tolerance: f64) -> bool {
        self.max_residual.is_finite() && self.max_residual <= tolerance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.max_residual).fold(0.0, |m, r| if r.is_nan() { f64::NAN } else { m.max(r) })
    }

    pub fn passed(&self, tolerance: f64) -> bool {
        self.checks.iter().all(|c| c.passed(tolerance))
    }

    pub fn failures(&self, tolerance: f64) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed(tolerance)).collect()
    }
}

/// Accumulates the worst residual of one identity.
struct Tally {
    name: String,
    worst: f64,
    samples: usize,
}

impl Tally {
    fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), worst: 0.0, samples: 0 }
    }

    fn add(&mut self, r: f64) {
        self.samples += 1;
        if r.is_nan() || r > self.worst {
            self.worst = if r.is_nan() { f64::INFINITY } else { r };
        }
    }

    fn done(self) -> Check {
        Check { name: self.name, max_residual: self.worst, samples: self.samples }
    }
}

fn single(name: &str, r: f64) -> Check {
    let mut t = Tally::new(name);
    t.add(r);
    t.done()
}

fn scaled(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

fn relative(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn rng_for(label: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED ^ label)
}

/// Runs a suite (or all of them) at the given couplings.
pub fn run_suite(suite: Suite, c: &Couplings) -> Result<Vec<SuiteReport>> {
    suite
        .members()
        .into_iter()
        .map(|s| {
            let checks = match s {
                Suite::Elliptic => elliptic_checks(c, ELLIPTIC_SAMPLES)?,
                Suite::Cauchy => cauchy_checks(c)?,
                Suite::Rotation => rotation_checks(c)?,
                Suite::FormFactor => formfactor_checks(c)?,
                Suite::All => unreachable!("All expands to its members"),
            };
            Ok(SuiteReport { suite: s, checks })
        })
        .collect()
}

/// The elliptic parametrization identities, each at `samples` random momenta
/// (pairs for the two-point identities).
pub fn elliptic_checks(c: &Couplings, samples: usize) -> Result<Vec<Check>> {
    let mut rng = rng_for(1);
    let m = c.modulus();
    let k = c.k();
    let sk = k.sqrt();
    let s2y = c.sinh_2ky();
    let s2xs = c.sinh_2kx_star();
    let (g0, gpi) = (c.gamma_0(), c.gamma_pi());
    let big_k = m.big_k();
    let kp = m.big_kprime();
    let eta = c.eta();
    let sn_c = |z: Complex64| m.sn_cn_dn(z);

    let mut out = Vec::new();
    let mut pm = [Tally::new("exp-gamma-theta/sn-shift-eta (+)"), Tally::new("exp-gamma-theta/sn-shift-eta (-)")];
    let mut one = [
        Tally::new("sn(u+K) half-angle form"),
        Tally::new("sn u half-angle form"),
        Tally::new("sn 2u form"),
        Tally::new("k sn^2 u form"),
        Tally::new("cn u trigonometric form"),
        Tally::new("dn u trigonometric form"),
        Tally::new("sqrt b elliptic form"),
        Tally::new("inverse sqrt b elliptic form"),
    ];
    for _ in 0..samples {
        let theta = rng.gen_range(0.0..TAU);
        let p = c.point(theta)?;
        let u = p.u;
        let g = p.gamma;
        for (idx, sign) in [1.0, -1.0].into_iter().enumerate() {
            let lhs = (-0.5 * Complex64::new(g, sign * theta)).exp();
            let (s, _, _) = sn_c(Complex64::new(u, -sign * eta))?;
            pm[idx].add(scaled(lhs, -sk * s));
        }
        let (s, cn, dn) = m.sn_cn_dn_real(u);
        one[0].add(scaled(re(m.sn(u + big_k) / s2y), re((0.5 * theta).sin() / (0.5 * (g + g0)).sinh())));
        one[1].add(scaled(re(s / s2y), re(-(0.5 * theta).cos() / (0.5 * (gpi + g)).sinh())));
        one[2].add(scaled(re(m.sn(2.0 * u) / s2y), re(-theta.sin() / p.sinh_gamma)));
        one[3].add(scaled(re(k * s * s), re((0.5 * (gpi - g)).sinh() / (0.5 * (gpi + g)).sinh())));
        let (sh0, shpi) = ((0.5 * (g0 + g)).sinh(), (0.5 * (gpi + g)).sinh());
        let cn_t = (0.5 * theta).sin() * (s2y * gpi.sinh() / (sh0 * shpi)).sqrt();
        let dn_t = (gpi.sinh() * sh0 / (s2y * shpi)).sqrt();
        one[4].add(scaled(re(cn), re(cn_t)));
        one[5].add(scaled(re(dn), re(dn_t)));
        let root = (1.0 - k * k * s.powi(4)).sqrt();
        one[6].add(scaled(Complex64::new(dn, k * s * cn) / root, p.sqrt_b));
        one[7].add(scaled(Complex64::new(dn, -k * s * cn) / root, 1.0 / p.sqrt_b));
    }
    out.extend(pm.into_iter().map(Tally::done));
    out.extend(one.into_iter().map(Tally::done));

    let mut two = [
        Tally::new("sn(u-u') sine-over-sinh form"),
        Tally::new("1 - k^2 sn^2 u sn^2 u' form"),
        Tally::new("D-matrix kernel dn/sn form"),
        Tally::new("C-matrix kernel cn form"),
        Tally::new("sn quarter-period shift (+iK')"),
        Tally::new("sn quarter-period shift (-iK')"),
    ];
    let mut taken = 0;
    while taken < samples {
        let (t, tp) = (rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU));
        let (sd, ss) = ((0.5 * (t - tp)).sin(), (0.5 * (t + tp)).sin());
        if sd.abs() < POLE_MARGIN || ss.abs() < POLE_MARGIN {
            continue;
        }
        taken += 1;
        let (p, q) = (c.point(t)?, c.point(tp)?);
        let d = p.u - q.u;
        let (sn_d, cn_d, dn_d) = m.sn_cn_dn_real(d);
        let shg = (0.5 * (p.gamma + q.gamma)).sinh();
        two[0].add(scaled(re(sn_d), re(s2y * sd / shg)));
        let (su, sv) = (m.sn(p.u), m.sn(q.u));
        let rhs = gpi.sinh() * shg / ((0.5 * (gpi + p.gamma)).sinh() * (0.5 * (gpi + q.gamma)).sinh());
        two[1].add(scaled(re(1.0 - k * k * su * su * sv * sv), re(rhs)));
        let norm = (p.sinh_gamma * q.sinh_gamma).sqrt();
        let ratio = p.sqrt_b / q.sqrt_b;
        two[2].add(scaled((ratio + 1.0 / ratio) / (2.0 * sd), re(s2y / norm * dn_d / sn_d)));
        let prod = p.sqrt_b * q.sqrt_b;
        two[3].add(scaled((prod - 1.0 / prod) / (2.0 * ss), -I * s2xs / norm * cn_d));
        let inv = re(1.0 / (sk * sn_d));
        for (idx, sign) in [1.0, -1.0].into_iter().enumerate() {
            let (s, _, _) = sn_c(Complex64::new(d, sign * kp))?;
            two[4 + idx].add(scaled(sk * s, inv));
        }
    }
    out.extend(two.into_iter().map(Tally::done));
    out.extend(jacobi_checks(c, samples, &mut rng)?);
    Ok(out)
}

/// Periodicity, Pythagorean, addition and doubling laws of sn, cn, dn at complex
/// points, the theta shift identities, η and the spectral-curve uniformization.
fn jacobi_checks(c: &Couplings, samples: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let m = c.modulus();
    let k = c.k();
    let (big_k, kp) = (m.big_k(), m.big_kprime());
    let mut t = [
        Tally::new("sn(u+2K) = -sn u"),
        Tally::new("sn(u+2iK') = sn u"),
        Tally::new("sn^2 + cn^2 = 1"),
        Tally::new("dn^2 + k^2 sn^2 = 1"),
        Tally::new("dn addition formula"),
        Tally::new("sn doubling formula"),
        Tally::new("spectral curve uniformization"),
    ];
    for _ in 0..samples {
        // |Im| < K'/2 keeps the sample off the pole lattice.
        let u = Complex64::new(rng.gen_range(-big_k..big_k), rng.gen_range(-0.45..0.45) * kp);
        let v = Complex64::new(rng.gen_range(-big_k..big_k), rng.gen_range(-0.45..0.45) * kp);
        let (s, cn, dn) = m.sn_cn_dn(u)?;
        let (s2, _, _) = m.sn_cn_dn(u + 2.0 * big_k)?;
        let (s3, _, _) = m.sn_cn_dn(u + Complex64::new(0.0, 2.0 * kp))?;
        t[0].add(scaled(s2, -s));
        t[1].add(scaled(s3, s));
        t[2].add(scaled(s * s + cn * cn, re(1.0)));
        t[3].add(scaled(dn * dn + k * k * s * s, re(1.0)));
        let (sv, cv, dv) = m.sn_cn_dn(v)?;
        let (_, _, d_sum) = m.sn_cn_dn(u + v)?;
        let add = (dn * dv - k * k * s * cn * sv * cv) / (1.0 - k * k * s * s * sv * sv);
        t[4].add(scaled(d_sum, add));
        let (s_dbl, _, _) = m.sn_cn_dn(2.0 * u)?;
        t[5].add(scaled(s_dbl, 2.0 * s * cn * dn / (1.0 - k * k * s.powi(4))));
        let (z, lambda) = c.curve_point(u)?;
        let scale = (z.norm() + 1.0 / z.norm()).max(lambda.norm() + 1.0 / lambda.norm());
        t[6].add(c.curve_residual(z, lambda) / scale);
    }
    let mut out: Vec<Check> = t.into_iter().map(Tally::done).collect();
    let (a, b) = cauchy::theta1_half_period_pair(c)?;
    out.push(single("theta1 half-period shift", scaled(a, b)));
    let (a, b) = cauchy::theta1_quarter_shift_pair(c)?;
    out.push(single("theta1 quarter shift", scaled(a, b)));
    let (sn_eta, _, _) = m.sn_cn_dn(Complex64::new(0.0, 2.0 * c.eta()))?;
    out.push(single("eta: sinh 2Kx = i sn 2i eta", scaled(I * sn_eta, re(c.sinh_2kx()))));
    Ok(out)
}

/// Φ and Ψ closed forms against dense linear algebra, the χ/κ and λ reductions,
/// the Frobenius determinant/inverse, theta interpolation and the sn pfaffian.
pub fn cauchy_checks(c: &Couplings) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    out.push(single("point balance sum x - sum y = -pi/2", (cauchy::ising_balance(c) + FRAC_PI_2).norm()));
    let phi = cauchy::phi_matrix(c)?;
    let psi = cauchy::psi_matrix(c)?;
    let (det, inv) = det_and_inverse(&phi)?;
    let pp = &psi * &inv;
    let ip = &inv * &psi;
    let d2 = det * det;
    let mut matrix = |name: &str, closed: &CMatrix, dense: &CMatrix| out.push(single(name, max_scaled_diff(closed, dense)));
    matrix("Phi^-1 closed vs dense", &cauchy::phi_inverse_closed(c)?, &inv);
    matrix("Phi^-1 theta vs dense", &cauchy::phi_inverse_theta(c)?, &inv);
    matrix("Phi^-1 sn vs dense", &cauchy::phi_inverse_sn(c), &inv);
    matrix("Phi^-1 trigonometric vs dense", &cauchy::phi_inverse_trig(c), &inv);
    matrix("Psi Phi^-1 closed vs dense", &cauchy::psi_phi_inverse_closed(c), &pp);
    matrix("Psi Phi^-1 theta vs dense", &cauchy::psi_phi_inverse_theta(c)?, &pp);
    matrix("Psi Phi^-1 trigonometric vs dense", &cauchy::psi_phi_inverse_trig(c), &pp);
    matrix("Phi^-1 Psi closed vs dense", &cauchy::phi_inverse_psi_closed(c), &ip);
    matrix("Phi^-1 Psi theta vs dense", &cauchy::phi_inverse_psi_theta(c)?, &ip);
    matrix("Phi^-1 Psi trigonometric vs dense", &cauchy::phi_inverse_psi_trig(c), &ip);
    out.push(single("det Phi theta vs LU (relative)", relative(cauchy::det_phi_theta(c)?, det)));
    out.push(single("(det Phi)^2 closed vs LU (relative)", relative(cauchy::det_phi_squared_closed(c)?, d2)));
    out.push(single("(det Phi)^2 sn vs LU (relative)", relative(re(cauchy::det_phi_squared_sn(c)), d2)));
    out.push(single("(det Phi)^2 trigonometric vs LU (relative)", relative(re(cauchy::det_phi_squared_trig(c)), d2)));

    let (chi, kappa) = cauchy::chi_kappa(c);
    let (chi_t, kappa_t) = cauchy::chi_kappa_trig(c);
    let mut t = Tally::new("chi/kappa sn products vs trigonometric");
    for (a, b) in chi.iter().zip(&chi_t).chain(kappa.iter().zip(&kappa_t)) {
        t.add(scaled(re(*a), re(*b)));
    }
    out.push(t.done());
    out.extend(lambda_checks(c)?);
    out.extend(sine_product_checks(c.n()));
    out.extend(frobenius_checks(FROBENIUS_CONFIGS, 8)?);
    out.extend(interpolation_checks(6)?);
    out.extend(sn_pfaffian_checks(c.modulus(), SUITE_PFAFFIAN_SIZE, 8)?);
    Ok(out)
}

/// λ_{θ,θ'} in sn-product, u-v, and theta forms against e^{(ν_θ' − ν_θ)/2}, over
/// all pairs of quasimomenta of both sectors plus random pairs.
pub fn lambda_checks(c: &Couplings) -> Result<Vec<Check>> {
    let mut rng = rng_for(2);
    let mut thetas: Vec<f64> = quasimomenta(Sector::Antiperiodic, c.n());
    thetas.extend(quasimomenta(Sector::Periodic, c.n()));
    thetas.extend((0..8).map(|_| rng.gen_range(0.0..TAU)));
    let mut t = [
        Tally::new("lambda sn product vs nu (relative)"),
        Tally::new("lambda(u, v) vs nu (relative)"),
        Tally::new("lambda theta form vs nu (relative)"),
    ];
    for &a in &thetas {
        for &b in &thetas {
            let nu = re(cauchy::lambda_nu(c, a, b));
            t[0].add(relative(re(cauchy::lambda_sn(c, a, b)), nu));
            t[1].add(relative(re(cauchy::lambda_uv(c, c.u(a), c.u(b))), nu));
            t[2].add(relative(cauchy::lambda_theta(c, c.u(a), c.u(b))?, nu));
        }
    }
    Ok(t.into_iter().map(Tally::done).collect())
}

fn sine_product_checks(n: usize) -> Vec<Check> {
    let mut rng = rng_for(3);
    let mut t = Tally::new("sector sine products closed forms");
    for sector in [Sector::Periodic, Sector::Antiperiodic] {
        for _ in 0..16 {
            let theta = rng.gen_range(0.0..TAU);
            t.add((cauchy::sine_product(theta, sector, n, false) - cauchy::sine_product_closed(theta, sector, n, false)).abs());
        }
        for theta in quasimomenta(sector, n) {
            let exact = cauchy::sine_product_closed(theta, sector, n, true);
            t.add((cauchy::sine_product(theta, sector, n, true) - exact).abs() / exact.abs().max(1.0));
        }
    }
    vec![t.done()]
}

/// A random elliptic Cauchy configuration of size n with x and y interlaced on
/// the real period.
pub fn random_frobenius_config(n: usize, rng: &mut impl Rng) -> Result<EllipticPointConfig> {
    let q = rng.gen_range(0.05..0.5);
    let l = -f64::ln(q);
    let mut pick = |offset: f64| -> Vec<Complex64> {
        (0..n)
            .map(|i| {
                let x = PI * (i as f64 + offset + rng.gen_range(-0.2..0.2)) / n as f64;
                Complex64::new(x, rng.gen_range(-0.2..0.2) * l)
            })
            .collect()
    };
    let xs = pick(0.0);
    let ys = pick(0.5);
    let alpha = Complex64::new(rng.gen_range(0.2..1.2), rng.gen_range(-0.3..0.3) * l);
    EllipticPointConfig::new(xs, ys, q, alpha)
}

/// Closed-form determinant and inverse of `count` random configurations of
/// sizes cycling through 1..=max_size, against LU.
pub fn frobenius_checks(count: usize, max_size: usize) -> Result<Vec<Check>> {
    let mut rng = rng_for(4);
    let mut det_t = Tally::new("Frobenius determinant vs LU (relative)");
    let mut inv_t = Tally::new("Frobenius inverse vs dense (relative to max entry)");
    for i in 0..count {
        let n = 1 + i % max_size;
        let cfg = random_frobenius_config(n, &mut rng)?;
        let m = cauchy::frobenius_matrix(&cfg)?;
        let (det, inv) = det_and_inverse(&m)?;
        det_t.add(relative(cauchy::frobenius_det(&cfg)?, det));
        let scale = inv.iter().map(|z| z.norm()).fold(1.0, f64::max);
        inv_t.add(max_abs_diff(&cauchy::frobenius_inverse(&cfg)?, &inv) / scale);
    }
    Ok(vec![det_t.done(), inv_t.done()])
}

/// Balanced theta interpolation sums for sizes 1..=max_size, relative to the
/// largest term.
pub fn interpolation_checks(max_size: usize) -> Result<Vec<Check>> {
    let mut rng = rng_for(5);
    let q = 0.3;
    let mut t = Tally::new("balanced theta interpolation sum (relative to term scale)");
    for m in 1..=max_size {
        for _ in 0..4 {
            let zs: Vec<Complex64> =
                (0..m).map(|_| Complex64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-0.3..0.3))).collect();
            let mut zp: Vec<Complex64> =
                (0..m).map(|_| Complex64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-0.3..0.3))).collect();
            let shift = zs.iter().sum::<Complex64>() - zp.iter().sum::<Complex64>();
            zp[m - 1] += shift;
            let terms = cauchy::theta_interpolation_terms(&zs, &zp, q)?;
            let scale = terms.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let sum = terms.iter().sum::<Complex64>().norm();
            // m = 1 balances only with z' = z, where the single term vanishes.
            t.add(if scale == 0.0 { sum } else { sum / scale });
        }
    }
    Ok(vec![t.done()])
}

/// Pf(√k sn(u_i − u_j)) against the product formula, and Pf² against LU, for
/// `trials` random even point sets of each size up to `max_size`. Points are
/// jittered around an even grid on (−K, K) so no difference nears a zero of sn.
///
/// The matrix is close to low rank when the nome is small (its Fourier
/// harmonics decay like q^{j+1/2}), so the numeric pfaffian loses about
/// log10(1/q) digits per extra pair; size 10 holds 1e−10 only for q ≳ 0.04.
pub fn sn_pfaffian_checks(modulus: &EllipticModulus, max_size: usize, trials: usize) -> Result<Vec<Check>> {
    let mut rng = rng_for(6);
    let big_k = modulus.big_k();
    let mut pf_t = Tally::new("sn pfaffian product vs numeric pfaffian (relative)");
    let mut sq_t = Tally::new("Pf^2 = det for sn matrix (relative)");
    for size in (2..=max_size).step_by(2) {
        for _ in 0..trials {
            let step = 2.0 * big_k / size as f64;
            let us: Vec<f64> =
                (0..size).map(|i| -big_k + step * (i as f64 + 0.5 + rng.gen_range(-0.3..0.3))).collect();
            let skew = cauchy::sn_skew_matrix(&us, modulus);
            let numeric = pfaffian(&skew);
            pf_t.add(relative(cauchy::sn_pfaffian_product(&us, modulus)?, numeric));
            sq_t.add(relative(numeric * numeric, determinant(skew.entries())?));
        }
    }
    Ok(vec![pf_t.done(), sq_t.done()])
}

/// Rotation relations at every site and agreement of the three two-particle routes.
pub fn rotation_checks(c: &Couplings) -> Result<Vec<Check>> {
    let mut rel_t = Tally::new("rotation relations AB^T+BA^T, CD^T+DC^T, AD^T+BC^T=1, unitarity");
    let mut cn_t = Tally::new("two-particle closed vs numeric");
    let mut en_t = Tally::new("two-particle elliptic vs numeric");
    let mut det_t = Tally::new("|det D| closed vs LU (relative)");
    let mut det_e = Tally::new("|det D| elliptic vs LU (relative)");
    for l in 0..c.n() {
        let rot = InducedRotation::new(c, l)?;
        rel_t.add(rot.residuals().max());
        let numeric = TwoParticleMatrices::numeric(&rot)?;
        let closed = TwoParticleMatrices::closed(c, l)?;
        let elliptic = TwoParticleMatrices::elliptic(c, l)?;
        cn_t.add(closed.max_scaled_diff(&numeric));
        en_t.add(elliptic.max_scaled_diff(&numeric));
        det_t.add(relative(re(closed.abs_det_d), re(numeric.abs_det_d)));
        det_e.add(relative(re(elliptic.abs_det_d), re(numeric.abs_det_d)));
    }
    Ok([rel_t, cn_t, en_t, det_t, det_e].into_iter().map(Tally::done).collect())
}

/// Closed products against pfaffians, the elliptic pairing assembly and the
/// translation phase, over every site and m + n ∈ {0, 2, 4}.
pub fn formfactor_checks(c: &Couplings) -> Result<Vec<Check>> {
    let n = c.n();
    let mut pf_t = Tally::new("closed vs pfaffian (relative)");
    let mut ell_t = Tally::new("elliptic sn pairing assembly vs pairings");
    let mut tr_t = Tally::new("translation phase across sites (relative)");
    let mut vac_t = Tally::new("vacuum overlap closed vs sqrt |det D|");
    let base: Vec<Vec<FormFactorSpec>> = [0, 2, 4].iter().map(|&t| FormFactorSpec::enumerate(n, 0, t)).collect();
    let f0: Vec<Vec<Complex64>> = base
        .iter()
        .map(|specs| specs.iter().map(|s| ff_closed(s, c).map(|r| r.value)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    for l in 0..n {
        let tp = TwoParticleMatrices::closed(c, l)?;
        vac_t.add(relative(re(vacuum_overlap(c)), re(tp.vacuum_overlap())));
        for (specs, values) in base.iter().zip(&f0) {
            for (spec0, &v0) in specs.iter().zip(values) {
                let spec = spec0.with_site(l)?;
                let closed = ff_closed(&spec, c)?.value;
                pf_t.add(relative(ff_pfaffian_with(&spec, &tp)?.value, closed));
                if spec.bra().len() + spec.ket().len() > 0 {
                    let direct = pairing_matrix(&spec, &tp);
                    ell_t.add(max_scaled_diff(elliptic_pairing_matrix(&spec, c)?.entries(), direct.entries()));
                }
                let p: f64 = spec.ket().thetas().iter().sum::<f64>() - spec.bra().thetas().iter().sum::<f64>();
                tr_t.add(relative(closed, Complex64::from_polar(1.0, l as f64 * p) * v0));
            }
        }
    }
    Ok(vec![pf_t.done(), ell_t.done(), tr_t.done(), vac_t.done()])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(c: &Couplings, suite: Suite) -> Vec<SuiteReport> {
        let r = run_suite(suite, c).unwrap();
        for s in &r {
            for ch in &s.checks {
                eprintln!("{:<10} {:<70} {:.3e} ({})", s.suite, ch.name, ch.max_residual, ch.samples);
            }
        }
        r
    }

    #[test]
    fn all_suites_pass() {
        for &(n, kx, ky) in &[(6, 0.3, 0.9), (3, 0.5, 0.5), (4, 0.7, 0.8), (8, 0.7, 0.8), (8, 0.3, 0.9), (1, 0.4, 0.7)] {
            let c = Couplings::new(n, kx, ky).unwrap();
            for s in report(&c, Suite::All) {
                assert!(s.passed(DEFAULT_TOLERANCE), "{} at N = {n}: {:?}", s.suite, s.failures(DEFAULT_TOLERANCE));
            }
        }
    }

    #[test]
    fn suite_names_round_trip() {
        for s in [Suite::Elliptic, Suite::Cauchy, Suite::Rotation, Suite::FormFactor, Suite::All] {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("bogus".parse::<Suite>().is_err());
        assert_eq!(Suite::All.members().len(), 4);
    }

    #[test]
    fn failing_check_is_reported() {
        let mut t = Tally::new("x");
        t.add(1e-3);
        t.add(f64::NAN);
        let ch = t.done();
        assert!(!ch.passed(1.0));
    }
}
