use num_complex::Complex64;

use crate::cauchy;
use crate::error::{Error, Result};
use crate::linalg::{det_and_inverse, max_abs_diff, CMatrix};
use crate::spectral::{Couplings, Sector, SpectralPoint};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn check_site(c: &Couplings, l: usize) -> Result<()> {
    if l >= c.n() {
        return Err(Error::Domain(format!("site {l} out of range for N = {}", c.n())));
    }
    Ok(())
}

fn phase(l: usize, theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, (l as f64 - 0.5) * theta)
}

/// The blocks A, B, C, D of the rotation induced by s_l on the fermion
/// operators; rows are periodic, columns antiperiodic momenta.
#[derive(Debug, Clone, PartialEq)]
pub struct InducedRotation {
    pub a: CMatrix,
    pub b: CMatrix,
    pub c: CMatrix,
    pub d: CMatrix,
    pub site: usize,
}

/// Largest entrywise deviations from the rotation relations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationResiduals {
    /// ABᵀ + BAᵀ
    pub ab: f64,
    /// CDᵀ + DCᵀ
    pub cd: f64,
    /// ADᵀ + BCᵀ − 1
    pub ad_bc: f64,
    /// CC† + DD† − 1
    pub unitarity: f64,
    /// conj(A) − D and conj(B) − C
    pub conjugation: f64,
}

impl RotationResiduals {
    pub fn max(&self) -> f64 {
        [self.ab, self.cd, self.ad_bc, self.unitarity, self.conjugation]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

impl InducedRotation {
    pub fn new(c: &Couplings, l: usize) -> Result<Self> {
        check_site(c, l)?;
        let n = c.n();
        let nf = n as f64;
        let p = c.points(Sector::Periodic);
        let a = c.points(Sector::Antiperiodic);
        let d = CMatrix::from_fn(n, n, |i, j| {
            let (t, tp) = (&p[i], &a[j]);
            let ratio = tp.sqrt_b / t.sqrt_b;
            phase(l, tp.theta - t.theta) / (2.0 * I * nf * (0.5 * (tp.theta - t.theta)).sin()) * (ratio + 1.0 / ratio)
        });
        let cm = CMatrix::from_fn(n, n, |i, j| {
            let (t, tp) = (&p[i], &a[j]);
            let prod = t.sqrt_b * tp.sqrt_b;
            phase(l, -(t.theta + tp.theta)) / (2.0 * I * nf * (0.5 * (t.theta + tp.theta)).sin()) * (prod - 1.0 / prod)
        });
        Ok(Self { a: d.map(|z| z.conj()), b: cm.map(|z| z.conj()), c: cm, d, site: l })
    }

    pub fn residuals(&self) -> RotationResiduals {
        let n = self.d.nrows();
        let id = CMatrix::identity(n, n);
        let zero = CMatrix::zeros(n, n);
        let ab = &self.a * self.b.transpose() + &self.b * self.a.transpose();
        let cd = &self.c * self.d.transpose() + &self.d * self.c.transpose();
        let ad_bc = &self.a * self.d.transpose() + &self.b * self.c.transpose();
        let un = &self.c * self.c.adjoint() + &self.d * self.d.adjoint();
        RotationResiduals {
            ab: max_abs_diff(&ab, &zero),
            cd: max_abs_diff(&cd, &zero),
            ad_bc: max_abs_diff(&ad_bc, &id),
            unitarity: max_abs_diff(&un, &id),
            conjugation: max_abs_diff(&self.a.map(|z| z.conj()), &self.d)
                .max(max_abs_diff(&self.b.map(|z| z.conj()), &self.c)),
        }
    }
}

/// Which formulas produce the two-particle matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TwoParticleSource {
    /// Trigonometric closed forms.
    Closed,
    /// Dense inversion and products of the induced rotation blocks.
    Numeric,
    /// Elliptic Cauchy inverses dressed by the diagonal Λ factors.
    Elliptic,
}

impl TwoParticleSource {
    pub fn name(self) -> &'static str {
        match self {
            TwoParticleSource::Closed => "closed",
            TwoParticleSource::Numeric => "numeric",
            TwoParticleSource::Elliptic => "elliptic",
        }
    }
}

/// Normalized two-particle form factors at one site: D⁻¹ (a × p), BD⁻¹ (p × p),
/// D⁻¹C (a × a), together with |det D|.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoParticleMatrices {
    pub d_inv: CMatrix,
    pub b_d_inv: CMatrix,
    pub d_inv_c: CMatrix,
    pub abs_det_d: f64,
    pub site: usize,
    pub source: TwoParticleSource,
}

impl TwoParticleMatrices {
    pub fn new(c: &Couplings, l: usize, source: TwoParticleSource) -> Result<Self> {
        match source {
            TwoParticleSource::Closed => Self::closed(c, l),
            TwoParticleSource::Numeric => Self::numeric(&InducedRotation::new(c, l)?),
            TwoParticleSource::Elliptic => Self::elliptic(c, l),
        }
    }

    pub fn closed(c: &Couplings, l: usize) -> Result<Self> {
        check_site(c, l)?;
        let n = c.n();
        let nf = n as f64;
        let p = c.points(Sector::Periodic);
        let a = c.points(Sector::Antiperiodic);
        let r2 = c.rho().powi(2);
        let norm = |x: &SpectralPoint, y: &SpectralPoint| nf * (x.sinh_gamma * y.sinh_gamma).sqrt();
        let ratio = |x: &SpectralPoint, y: &SpectralPoint| {
            (0.5 * (x.theta - y.theta)).sin() / (0.5 * (x.gamma + y.gamma)).sinh()
        };
        let d_inv = CMatrix::from_fn(n, n, |i, j| {
            let (t, tp) = (&a[i], &p[j]);
            I * phase(l, tp.theta - t.theta) * (0.5 * (t.nu - tp.nu)).exp() / (norm(t, tp) * ratio(t, tp))
        });
        let b_d_inv = CMatrix::from_fn(n, n, |i, j| {
            let (t, tp) = (&p[i], &p[j]);
            -I * phase(l, t.theta + tp.theta) * r2 * (-0.5 * (t.nu + tp.nu)).exp() / norm(t, tp) * ratio(t, tp)
        });
        let d_inv_c = CMatrix::from_fn(n, n, |i, j| {
            let (t, tp) = (&a[i], &a[j]);
            -I * phase(l, -(t.theta + tp.theta)) * r2 * (0.5 * (t.nu + tp.nu)).exp() / norm(t, tp) * ratio(t, tp)
        });
        Ok(Self { d_inv, b_d_inv, d_inv_c, abs_det_d: abs_det_d_closed(c), site: l, source: TwoParticleSource::Closed })
    }

    pub fn numeric(rot: &InducedRotation) -> Result<Self> {
        let (det, d_inv) = det_and_inverse(&rot.d)?;
        Ok(Self {
            b_d_inv: &rot.b * &d_inv,
            d_inv_c: &d_inv * &rot.c,
            d_inv,
            abs_det_d: det.norm(),
            site: rot.site,
            source: TwoParticleSource::Numeric,
        })
    }

    pub fn elliptic(c: &Couplings, l: usize) -> Result<Self> {
        check_site(c, l)?;
        let lambda = |sector| -> Vec<Complex64> {
            c.points(sector).iter().map(|p| phase(l, p.theta) / p.sinh_gamma.sqrt()).collect()
        };
        let la = lambda(Sector::Antiperiodic);
        let lp = lambda(Sector::Periodic);
        let nf = c.n() as f64;
        let ratio = c.sinh_2kx_star() / c.sinh_2ky();
        let phi_inv = cauchy::phi_inverse_closed(c)?;
        let psi_phi_inv = cauchy::psi_phi_inverse_closed(c);
        let phi_inv_psi = cauchy::phi_inverse_psi_closed(c);
        let d_inv = CMatrix::from_fn(c.n(), c.n(), |i, j| {
            -I * nf / c.sinh_2ky() * phi_inv[(i, j)] / (la[i] * lp[j].conj())
        });
        let b_d_inv = CMatrix::from_fn(c.n(), c.n(), |i, j| I * ratio * lp[i] * psi_phi_inv[(i, j)] / lp[j].conj());
        let d_inv_c = CMatrix::from_fn(c.n(), c.n(), |i, j| I * ratio * phi_inv_psi[(i, j)] * la[j].conj() / la[i]);
        Ok(Self { d_inv, b_d_inv, d_inv_c, abs_det_d: abs_det_d_elliptic(c)?, site: l, source: TwoParticleSource::Elliptic })
    }

    /// √|det D|, the modulus of the vacuum-to-vacuum matrix element.
    pub fn vacuum_overlap(&self) -> f64 {
        self.abs_det_d.sqrt()
    }

    /// Largest entrywise |self − other| / max(1, |other|) over the three matrices.
    pub fn max_scaled_diff(&self, other: &Self) -> f64 {
        use crate::linalg::max_scaled_diff as d;
        d(&self.d_inv, &other.d_inv)
            .max(d(&self.b_d_inv, &other.b_d_inv))
            .max(d(&self.d_inv_c, &other.d_inv_c))
    }
}

/// |det D| = [(1 − k²) Π_p e^{ν} Π_a e^{−ν}]^{1/4}.
pub fn abs_det_d_closed(c: &Couplings) -> f64 {
    c.xi() * c.xi_t()
}

/// |det D| = sinh^N 2K_y |det Φ| / (N^N √(Π sinh γ)), with det Φ from theta functions.
pub fn abs_det_d_elliptic(c: &Couplings) -> Result<f64> {
    let det_phi = cauchy::det_phi_theta(c)?.norm();
    let nf = c.n() as f64;
    let log_sinh: f64 = c
        .points(Sector::Periodic)
        .iter()
        .chain(c.points(Sector::Antiperiodic))
        .map(|p| p.sinh_gamma.ln())
        .sum();
    Ok((nf * (c.sinh_2ky().ln() - nf.ln()) - 0.5 * log_sinh).exp() * det_phi)
}

/// ⟨vac|s_l|vac⟩ = |det D|^{1/2} = √(ξ ξ_T).
pub fn vacuum_overlap(c: &Couplings) -> f64 {
    (c.xi() * c.xi_t()).sqrt()
}
