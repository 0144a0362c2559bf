use num_complex::Complex64;

use super::rotation::{TwoParticleMatrices, TwoParticleSource};
use super::state::FormFactorSpec;
use crate::error::{Error, Result};
use crate::linalg::{pfaffian, SkewMatrix};
use crate::spectral::{Couplings, SpectralPoint};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// How a form-factor value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    Closed,
    Pfaffian(TwoParticleSource),
    /// Modulus only: the oracle's eigenvector phases are arbitrary.
    OracleModulus,
}

impl Provenance {
    pub fn name(&self) -> String {
        match self {
            Provenance::Closed => "closed".into(),
            Provenance::Pfaffian(s) => format!("pfaffian/{}", s.name()),
            Provenance::OracleModulus => "oracle-modulus".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormFactorResult {
    pub value: Complex64,
    pub provenance: Provenance,
}

impl FormFactorResult {
    pub fn modulus(&self) -> f64 {
        self.value.norm()
    }
}

fn check_width(spec: &FormFactorSpec, c: &Couplings) -> Result<()> {
    if spec.n() != c.n() {
        return Err(Error::InvalidState(format!("spec width {} differs from couplings width {}", spec.n(), c.n())));
    }
    Ok(())
}

fn spec_points<'a>(spec: &FormFactorSpec, c: &'a Couplings) -> (Vec<&'a SpectralPoint>, Vec<&'a SpectralPoint>) {
    (
        spec.bra().momenta().into_iter().map(|m| c.point_of(m)).collect(),
        spec.ket().momenta().into_iter().map(|m| c.point_of(m)).collect(),
    )
}

/// i^{2mn − (m+n)/2} for even m + n; the exponent is an integer.
pub fn i_power(m: usize, n: usize) -> Complex64 {
    let e = (2 * m * n) as i64 - ((m + n) / 2) as i64;
    match e.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => I,
        2 => Complex64::new(-1.0, 0.0),
        _ => -I,
    }
}

fn sin_half(x: &SpectralPoint, y: &SpectralPoint) -> f64 {
    (0.5 * (x.theta - y.theta)).sin()
}

fn sinh_half(x: &SpectralPoint, y: &SpectralPoint) -> f64 {
    (0.5 * (x.gamma + y.gamma)).sinh()
}

/// Closed-form value from explicit spectral points at site l; bra points are
/// antiperiodic, ket points periodic, m + n even.
pub(crate) fn closed_value(c: &Couplings, l: usize, bra: &[&SpectralPoint], ket: &[&SpectralPoint]) -> Complex64 {
    let (m, n) = (bra.len(), ket.len());
    let nf = c.n() as f64;
    let lh = l as f64 - 0.5;
    let mn = m as i64 - n as i64;
    let mut value = i_power(m, n) * (c.xi() * c.xi_t()).sqrt() * c.rho().powi((mn * mn / 2) as i32);
    for p in bra {
        value *= Complex64::from_polar((0.5 * p.nu).exp() / (nf * p.sinh_gamma).sqrt(), -lh * p.theta);
    }
    for p in ket {
        value *= Complex64::from_polar((-0.5 * p.nu).exp() / (nf * p.sinh_gamma).sqrt(), lh * p.theta);
    }
    let mut real = 1.0;
    for (i, x) in bra.iter().enumerate() {
        for y in &bra[i + 1..] {
            real *= sin_half(x, y) / sinh_half(x, y);
        }
    }
    for (i, x) in ket.iter().enumerate() {
        for y in &ket[i + 1..] {
            real *= sin_half(x, y) / sinh_half(x, y);
        }
    }
    for x in bra {
        for y in ket {
            real *= sinh_half(x, y) / sin_half(x, y);
        }
    }
    value * real
}

/// The explicit product formula for ⟨θ_1..θ_m|s_l|θ'_1..θ'_n⟩.
pub fn ff_closed(spec: &FormFactorSpec, c: &Couplings) -> Result<FormFactorResult> {
    check_width(spec, c)?;
    let (bra, ket) = spec_points(spec, c);
    Ok(FormFactorResult { value: closed_value(c, spec.site(), &bra, &ket), provenance: Provenance::Closed })
}

/// The skew matrix of pairings built from two-particle matrices.
pub fn pairing_matrix(spec: &FormFactorSpec, tp: &TwoParticleMatrices) -> SkewMatrix {
    let bra = spec.bra().indices();
    let ket = spec.ket().indices();
    let m = bra.len();
    SkewMatrix::from_upper(m + ket.len(), |i, j| match (i < m, j < m) {
        (true, true) => tp.d_inv_c[(bra[i], bra[j])],
        (true, false) => tp.d_inv[(bra[i], ket[j - m])],
        _ => tp.b_d_inv[(ket[i - m], ket[j - m])],
    })
}

/// |det D|^{1/2} Pf R with precomputed two-particle matrices for the spec's site.
pub fn ff_pfaffian_with(spec: &FormFactorSpec, tp: &TwoParticleMatrices) -> Result<FormFactorResult> {
    if tp.site != spec.site() || tp.d_inv.nrows() != spec.n() {
        return Err(Error::Precondition(format!(
            "two-particle matrices for site {} and width {} do not match {spec}",
            tp.site,
            tp.d_inv.nrows()
        )));
    }
    Ok(FormFactorResult {
        value: tp.vacuum_overlap() * pfaffian(&pairing_matrix(spec, tp)),
        provenance: Provenance::Pfaffian(tp.source),
    })
}

/// |det D|^{1/2} Pf R, with the pairings taken from the chosen two-particle source.
pub fn ff_pfaffian(spec: &FormFactorSpec, c: &Couplings, source: TwoParticleSource) -> Result<FormFactorResult> {
    check_width(spec, c)?;
    ff_pfaffian_with(spec, &TwoParticleMatrices::new(c, spec.site(), source)?)
}

/// The pairing matrix assembled as −iρ Ω R̃ Ω with R̃_ij = √k sn(ũ_i − ũ_j), where
/// ũ = u_θ + iK' on bra momenta and u_θ' on ket momenta.
pub fn elliptic_pairing_matrix(spec: &FormFactorSpec, c: &Couplings) -> Result<SkewMatrix> {
    check_width(spec, c)?;
    let (bra, ket) = spec_points(spec, c);
    let nf = c.n() as f64;
    let lh = spec.site() as f64 - 0.5;
    let kp = c.modulus().big_kprime();
    let mut omega = Vec::new();
    let mut us = Vec::new();
    for p in &bra {
        omega.push(-Complex64::from_polar((0.5 * p.nu).exp() / (nf * p.sinh_gamma).sqrt(), -lh * p.theta));
        us.push(Complex64::new(p.u, kp));
    }
    for p in &ket {
        omega.push(Complex64::from_polar((-0.5 * p.nu).exp() / (nf * p.sinh_gamma).sqrt(), lh * p.theta));
        us.push(Complex64::new(p.u, 0.0));
    }
    let sqrt_k = c.k().sqrt();
    let pre = -I * c.rho();
    let dim = us.len();
    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for j in i + 1..dim {
            let (sn, _, _) = c.modulus().sn_cn_dn(us[i] - us[j])?;
            entries[i * dim + j] = pre * omega[i] * omega[j] * sqrt_k * sn;
        }
    }
    Ok(SkewMatrix::from_upper(dim, |i, j| entries[i * dim + j]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formfactors::rotation::vacuum_overlap;
    use crate::formfactors::state::{FockState, FormFactorSpec};
    use crate::linalg::max_scaled_diff;
    use crate::spectral::Sector;

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    #[test]
    fn i_power_values() {
        assert_eq!(i_power(0, 0), Complex64::new(1.0, 0.0));
        assert_eq!(i_power(2, 0), -I);
        assert_eq!(i_power(1, 1), I);
        assert_eq!(i_power(2, 2), Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn vacuum_value() {
        let c = Couplings::new(5, 0.4, 0.7).unwrap();
        let spec = FormFactorSpec::from_indices(5, 3, &[], &[]).unwrap();
        let v = ff_closed(&spec, &c).unwrap().value;
        assert!((v - vacuum_overlap(&c)).norm() < 1e-15);
        let p = ff_pfaffian(&spec, &c, TwoParticleSource::Numeric).unwrap().value;
        assert!(rel(p, v) < 1e-12);
    }

    #[test]
    fn two_particle_is_single_pairing() {
        let c = Couplings::new(4, 0.4, 0.7).unwrap();
        let tp = TwoParticleMatrices::closed(&c, 1).unwrap();
        let spec = FormFactorSpec::from_indices(4, 1, &[0, 2], &[]).unwrap();
        let v = ff_pfaffian_with(&spec, &tp).unwrap().value;
        assert!(rel(v, tp.vacuum_overlap() * tp.d_inv_c[(0, 2)]) < 1e-15);
    }

    #[test]
    fn closed_matches_pfaffian() {
        for &(kx, ky) in &[(0.3, 0.9), (0.5, 0.5), (0.7, 0.8)] {
            for n in 1..=6 {
                let c = Couplings::new(n, kx, ky).unwrap();
                for l in 0..n {
                    let tp = TwoParticleMatrices::new(&c, l, TwoParticleSource::Numeric).unwrap();
                    for total in [0, 2, 4] {
                        for spec in FormFactorSpec::enumerate(n, l, total) {
                            let a = ff_closed(&spec, &c).unwrap().value;
                            let b = ff_pfaffian_with(&spec, &tp).unwrap().value;
                            assert!(rel(a, b) < 1e-10, "{spec} N = {n}: {a} vs {b}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn elliptic_assembly_matches_pairings() {
        let c = Couplings::new(5, 0.4, 0.7).unwrap();
        let tp = TwoParticleMatrices::closed(&c, 2).unwrap();
        for total in [2, 4] {
            for spec in FormFactorSpec::enumerate(5, 2, total) {
                let direct = pairing_matrix(&spec, &tp);
                let ell = elliptic_pairing_matrix(&spec, &c).unwrap();
                assert!(max_scaled_diff(ell.entries(), direct.entries()) < 1e-10, "{spec}");
            }
        }
    }

    #[test]
    fn translation_phase() {
        let c = Couplings::new(5, 0.4, 0.7).unwrap();
        for spec in FormFactorSpec::enumerate(5, 0, 2) {
            let f0 = ff_closed(&spec, &c).unwrap().value;
            let p: f64 = spec.ket().thetas().iter().sum::<f64>() - spec.bra().thetas().iter().sum::<f64>();
            for l in 1..5 {
                let fl = ff_closed(&spec.with_site(l).unwrap(), &c).unwrap().value;
                assert!((fl - Complex64::from_polar(1.0, l as f64 * p) * f0).norm() < 1e-12 * f0.norm());
            }
        }
    }

    #[test]
    fn width_mismatch_rejected() {
        let c = Couplings::new(3, 0.4, 0.7).unwrap();
        let spec = FormFactorSpec::new(
            0,
            FockState::vacuum(Sector::Antiperiodic, 4),
            FockState::vacuum(Sector::Periodic, 4),
        )
        .unwrap();
        assert!(ff_closed(&spec, &c).is_err());
    }
}
