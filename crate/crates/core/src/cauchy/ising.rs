use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use super::frobenius::DnSnCauchy;
use crate::elliptic::ThetaIndex;
use crate::error::Result;
use crate::linalg::CMatrix;
use crate::spectral::{Couplings, Sector, SpectralPoint};

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn us_of(c: &Couplings, sector: Sector) -> Vec<f64> {
    c.points(sector).iter().map(|p| p.u).collect()
}

/// Elliptic parameters (u_θ for θ periodic, v_θ' = u_θ' for θ' antiperiodic), ordered by index.
pub fn ising_points(c: &Couplings) -> (Vec<f64>, Vec<f64>) {
    (us_of(c, Sector::Periodic), us_of(c, Sector::Antiperiodic))
}

/// Theta-argument form of the Ising points: x = ϑ₃⁻² u_θ (periodic), y = ϑ₃⁻² u_θ' (antiperiodic).
pub fn ising_theta_points(c: &Couplings) -> (Vec<Complex64>, Vec<Complex64>) {
    let scale = |u: f64| c.modulus().to_theta_argument(re(u));
    let (us, vs) = ising_points(c);
    (us.into_iter().map(scale).collect(), vs.into_iter().map(scale).collect())
}

/// Σx − Σy for the Ising points; equal to −π/2.
pub fn ising_balance(c: &Couplings) -> Complex64 {
    let (xs, ys) = ising_theta_points(c);
    xs.iter().sum::<Complex64>() - ys.iter().sum::<Complex64>()
}

fn cauchy(c: &Couplings) -> Result<(Vec<f64>, Vec<f64>, DnSnCauchy<'_>)> {
    let (us, vs) = ising_points(c);
    let dc = DnSnCauchy::new(&us, &vs, c.modulus())?;
    Ok((us, vs, dc))
}

/// Φ_{θ,θ'} = dn(u_θ − u_θ')/sn(u_θ − u_θ'), θ periodic (rows), θ' antiperiodic (columns).
pub fn phi_matrix(c: &Couplings) -> Result<CMatrix> {
    Ok(cauchy(c)?.2.phi())
}

/// Ψ_{θ,θ'} = cn(u_θ − u_θ'), θ periodic (rows), θ' antiperiodic (columns).
pub fn psi_matrix(c: &Couplings) -> Result<CMatrix> {
    Ok(cauchy(c)?.2.psi())
}

/// det Φ from the theta-function determinant formula.
pub fn det_phi_theta(c: &Couplings) -> Result<Complex64> {
    cauchy(c)?.2.det_phi()
}

/// Φ⁻¹ from the general theta-function inverse formula.
pub fn phi_inverse_theta(c: &Couplings) -> Result<CMatrix> {
    cauchy(c)?.2.phi_inverse()
}

/// ΨΦ⁻¹ from the general theta-function formula.
pub fn psi_phi_inverse_theta(c: &Couplings) -> Result<CMatrix> {
    cauchy(c)?.2.psi_phi_inverse()
}

/// Φ⁻¹Ψ from the general theta-function formula.
pub fn phi_inverse_psi_theta(c: &Couplings) -> Result<CMatrix> {
    cauchy(c)?.2.phi_inverse_psi()
}

/// The coefficients f_n (periodic) and g_m (antiperiodic) of the balanced inverse.
pub fn f_g_coefficients(c: &Couplings) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let (xs, ys) = ising_theta_points(c);
    let (t2, t3, t4) = c.modulus().theta_constants();
    let pre = Complex64::new(0.0, t3 / (t2 * t4));
    let th1 = |z| c.theta1(z);
    let tables = super::frobenius::PairTables::new(&xs, &ys, &th1)?;
    Ok((
        tables.x_ratio.iter().map(|r| pre * r).collect(),
        tables.y_ratio.iter().map(|r| pre * r).collect(),
    ))
}

/// Φ⁻¹_{mn} = f_n g_m / sn(u_n − v_m), m antiperiodic (rows), n periodic (columns).
pub fn phi_inverse_closed(c: &Couplings) -> Result<CMatrix> {
    let (us, vs) = ising_points(c);
    let (f, g) = f_g_coefficients(c)?;
    let m = c.modulus();
    let n = c.n();
    Ok(CMatrix::from_fn(n, n, |row, col| f[col] * g[row] / m.sn(us[col] - vs[row])))
}

/// (det Φ)² = ϑ₃⁻² ϑ₄² / Π f_i g_i.
pub fn det_phi_squared_closed(c: &Couplings) -> Result<Complex64> {
    let (f, g) = f_g_coefficients(c)?;
    let (_, t3, t4) = c.modulus().theta_constants();
    let prod: Complex64 = f.iter().zip(&g).map(|(a, b)| a * b).product();
    Ok(re(t4 * t4 / (t3 * t3)) / prod)
}

/// χ_θ (θ periodic) and κ_θ (θ antiperiodic) as ratios of sn products.
pub fn chi_kappa(c: &Couplings) -> (Vec<f64>, Vec<f64>) {
    let (us, vs) = ising_points(c);
    let m = c.modulus();
    let ratio = |x: f64, others_num: &[f64], others_den: &[f64], skip: usize| {
        let mut r = 1.0;
        for &o in others_num {
            r *= m.sn(x - o);
        }
        for (i, &o) in others_den.iter().enumerate() {
            if i != skip {
                r /= m.sn(x - o);
            }
        }
        r
    };
    let chi = us.iter().enumerate().map(|(n, &u)| ratio(u, &vs, &us, n)).collect();
    let kappa = vs.iter().enumerate().map(|(n, &v)| ratio(v, &us, &vs, n)).collect();
    (chi, kappa)
}

/// 2^{N−1} Π sin((θ − θ')/2) over a sector, optionally skipping θ' = θ.
pub fn sine_product(theta: f64, sector: Sector, n: usize, skip_equal: bool) -> f64 {
    let mut p = 2f64.powi(n as i32 - 1);
    for t in crate::spectral::quasimomenta(sector, n) {
        if skip_equal && ((t - theta).abs() < 1e-12) {
            continue;
        }
        p *= (0.5 * (theta - t)).sin();
    }
    p
}

/// Closed forms of [`sine_product`]: (−1)^{N−1} sin(Nθ/2), (−1)^N cos(Nθ/2) and,
/// when θ itself is skipped, (−1)^{N−1} N cos(Nθ/2) resp. (−1)^{N−1} N sin(Nθ/2).
pub fn sine_product_closed(theta: f64, sector: Sector, n: usize, skip_equal: bool) -> f64 {
    let nf = n as f64;
    let half = 0.5 * nf * theta;
    let odd = if n % 2 == 1 { 1.0 } else { -1.0 };
    match (sector, skip_equal) {
        (Sector::Periodic, false) => odd * half.sin(),
        (Sector::Antiperiodic, false) => -odd * half.cos(),
        (Sector::Periodic, true) => odd * nf * half.cos(),
        (Sector::Antiperiodic, true) => odd * nf * half.sin(),
    }
}

/// χ and κ from the trigonometric reduction.
pub fn chi_kappa_trig(c: &Couplings) -> (Vec<f64>, Vec<f64>) {
    let n = c.n();
    let pre = |p: &SpectralPoint| c.sinh_2ky() / p.sinh_gamma;
    let chi = c
        .points(Sector::Periodic)
        .iter()
        .map(|p| {
            (-p.nu).exp() * pre(p) * sine_product_closed(p.theta, Sector::Antiperiodic, n, false)
                / sine_product_closed(p.theta, Sector::Periodic, n, true)
        })
        .collect();
    let kappa = c
        .points(Sector::Antiperiodic)
        .iter()
        .map(|p| {
            p.nu.exp() * pre(p) * sine_product_closed(p.theta, Sector::Periodic, n, false)
                / sine_product_closed(p.theta, Sector::Antiperiodic, n, true)
        })
        .collect();
    (chi, kappa)
}

/// λ(u, v) in sn form for the Ising point sets.
pub fn lambda_uv(c: &Couplings, u: f64, v: f64) -> f64 {
    let m = c.modulus();
    let k = c.k();
    let (su, _, du) = m.sn_cn_dn_real(u);
    let (sv, _, dv) = m.sn_cn_dn_real(v);
    let (us, vs) = ising_points(c);
    let mut r = du * (1.0 + k * sv) / (dv * (1.0 + k * su));
    for (&ui, &vi) in us.iter().zip(&vs) {
        let (sui, svi) = (m.sn(ui), m.sn(vi));
        r *= (1.0 - k * sui * su) * (1.0 - k * svi * sv) / ((1.0 - k * svi * su) * (1.0 - k * sui * sv));
    }
    r
}

/// λ_{θ,θ'} as the sn product over the periodic (θ'' ≠ 0) and antiperiodic momenta.
pub fn lambda_sn(c: &Couplings, theta: f64, theta_prime: f64) -> f64 {
    let m = c.modulus();
    let k = c.k();
    let (s, _, d) = m.sn_cn_dn_real(c.u(theta));
    let (sp, _, dp) = m.sn_cn_dn_real(c.u(theta_prime));
    let mut r = d / dp;
    for p in c.points(Sector::Periodic).iter().skip(1) {
        let sq = m.sn(p.u);
        r *= (1.0 - k * sq * s) / (1.0 - k * sq * sp);
    }
    for p in c.points(Sector::Antiperiodic) {
        let sq = m.sn(p.u);
        r *= (1.0 - k * sq * sp) / (1.0 - k * sq * s);
    }
    r
}

/// λ_{θ,θ'} = e^{(ν_θ' − ν_θ)/2}.
pub fn lambda_nu(c: &Couplings, theta: f64, theta_prime: f64) -> f64 {
    (0.5 * (c.nu(theta_prime) - c.nu(theta))).exp()
}

/// h(z) = Π ϑ₁(z − x_i)/ϑ₁(z − y_i), the raw theta form behind λ.
pub fn h_theta(c: &Couplings, z: Complex64) -> Result<Complex64> {
    let (xs, ys) = ising_theta_points(c);
    let mut r = re(1.0);
    for (x, y) in xs.iter().zip(&ys) {
        r *= c.theta1(z - x)? / c.theta1(z - y)?;
    }
    Ok(r)
}

/// λ(u, v) = h(ϑ₃⁻²u − πτ/2)/h(ϑ₃⁻²v − πτ/2) evaluated with theta functions.
pub fn lambda_theta(c: &Couplings, u: f64, v: f64) -> Result<Complex64> {
    let half = Complex64::new(0.0, 0.5 * c.modulus().log_nome());
    let arg = |w: f64| c.modulus().to_theta_argument(re(w)) - half;
    Ok(h_theta(c, arg(u))? / h_theta(c, arg(v))?)
}

/// Φ⁻¹_{mn} = κ_m χ_n λ(v_m, u_n)/sn(v_m − u_n).
pub fn phi_inverse_sn(c: &Couplings) -> CMatrix {
    let (us, vs) = ising_points(c);
    let (chi, kappa) = chi_kappa(c);
    let m = c.modulus();
    CMatrix::from_fn(c.n(), c.n(), |row, col| {
        re(kappa[row] * chi[col] * lambda_uv(c, vs[row], us[col]) / m.sn(vs[row] - us[col]))
    })
}

/// (det Φ)² = (−1)^N √(1−k²) / Π κ_i χ_i λ(v_i, u_i).
pub fn det_phi_squared_sn(c: &Couplings) -> f64 {
    let (us, vs) = ising_points(c);
    let (chi, kappa) = chi_kappa(c);
    let mut prod = 1.0;
    for i in 0..c.n() {
        prod *= kappa[i] * chi[i] * lambda_uv(c, vs[i], us[i]);
    }
    let sign = if c.n() % 2 == 0 { 1.0 } else { -1.0 };
    sign * c.xi().powi(2) / prod
}

/// (ΨΦ⁻¹)_{ln} = χ_n λ(u_l, u_n) sn(u_l − u_n), periodic × periodic.
pub fn psi_phi_inverse_closed(c: &Couplings) -> CMatrix {
    let (us, _) = ising_points(c);
    let (chi, _) = chi_kappa(c);
    let m = c.modulus();
    CMatrix::from_fn(c.n(), c.n(), |l, n| re(chi[n] * lambda_uv(c, us[l], us[n]) * m.sn(us[l] - us[n])))
}

/// (Φ⁻¹Ψ)_{ml} = κ_m λ(v_m, v_l) sn(v_l − v_m), antiperiodic × antiperiodic.
pub fn phi_inverse_psi_closed(c: &Couplings) -> CMatrix {
    let (_, vs) = ising_points(c);
    let (_, kappa) = chi_kappa(c);
    let m = c.modulus();
    CMatrix::from_fn(c.n(), c.n(), |mm, l| re(kappa[mm] * lambda_uv(c, vs[mm], vs[l]) * m.sn(vs[l] - vs[mm])))
}

fn half_sinh(a: &SpectralPoint, b: &SpectralPoint) -> f64 {
    (0.5 * (a.gamma + b.gamma)).sinh()
}

fn half_sin(a: &SpectralPoint, b: &SpectralPoint) -> f64 {
    (0.5 * (a.theta - b.theta)).sin()
}

/// (det Φ)² in trigonometric form.
pub fn det_phi_squared_trig(c: &Couplings) -> f64 {
    let n = c.n() as f64;
    let mut log = 2.0 * n * n.ln() + 0.5 * (1.0 - c.k() * c.k()).ln() - 2.0 * n * c.sinh_2ky().ln();
    for p in c.points(Sector::Periodic) {
        log += 0.5 * p.nu + p.sinh_gamma.ln();
    }
    for p in c.points(Sector::Antiperiodic) {
        log += -0.5 * p.nu + p.sinh_gamma.ln();
    }
    log.exp()
}

/// Φ⁻¹_{θ,θ'} in trigonometric form, θ antiperiodic, θ' periodic.
pub fn phi_inverse_trig(c: &Couplings) -> CMatrix {
    let n = c.n() as f64;
    let a = c.points(Sector::Antiperiodic);
    let p = c.points(Sector::Periodic);
    CMatrix::from_fn(c.n(), c.n(), |i, j| {
        let (t, tp) = (&a[i], &p[j]);
        re(-c.sinh_2ky() * (0.5 * (t.nu - tp.nu)).exp() / (n * n * t.sinh_gamma * tp.sinh_gamma) * half_sinh(t, tp)
            / half_sin(t, tp))
    })
}

/// (ΨΦ⁻¹)_{θ,θ'} in trigonometric form, both periodic.
pub fn psi_phi_inverse_trig(c: &Couplings) -> CMatrix {
    let n = c.n() as f64;
    let p = c.points(Sector::Periodic);
    let s2 = c.sinh_2ky().powi(2);
    CMatrix::from_fn(c.n(), c.n(), |i, j| {
        let (t, tp) = (&p[i], &p[j]);
        re(-s2 * (-0.5 * (t.nu + tp.nu)).exp() / (n * tp.sinh_gamma) * half_sin(t, tp) / half_sinh(t, tp))
    })
}

/// (Φ⁻¹Ψ)_{θ,θ'} in trigonometric form, both antiperiodic.
pub fn phi_inverse_psi_trig(c: &Couplings) -> CMatrix {
    let n = c.n() as f64;
    let a = c.points(Sector::Antiperiodic);
    let s2 = c.sinh_2ky().powi(2);
    CMatrix::from_fn(c.n(), c.n(), |i, j| {
        let (t, tp) = (&a[i], &a[j]);
        re(-s2 * (0.5 * (t.nu + tp.nu)).exp() / (n * t.sinh_gamma) * half_sin(t, tp) / half_sinh(t, tp))
    })
}

/// ϑ₁(πτ/2) and i e^{−iπτ/4} ϑ₄(0), which coincide.
pub fn theta1_half_period_pair(c: &Couplings) -> Result<(Complex64, Complex64)> {
    let pt = Complex64::new(0.0, c.modulus().log_nome());
    let lhs = c.theta1(pt / 2.0)?;
    let t4 = c.modulus().theta(ThetaIndex::Four, re(0.0))?;
    Ok((lhs, Complex64::new(0.0, 1.0) * (Complex64::new(0.0, -1.0) * pt / 4.0).exp() * t4))
}

/// ϑ₁(π/2 − πτ/2) and e^{−iπτ/4} ϑ₃(0), which coincide.
pub fn theta1_quarter_shift_pair(c: &Couplings) -> Result<(Complex64, Complex64)> {
    let pt = Complex64::new(0.0, c.modulus().log_nome());
    let lhs = c.theta1(re(FRAC_PI_2) - pt / 2.0)?;
    let (_, t3, _) = c.modulus().theta_constants();
    Ok((lhs, (Complex64::new(0.0, -1.0) * pt / 4.0).exp() * t3))
}
