//! Serializable reports. Every number carries an explicit key; the CSV forms
//! are flat rows of the same data.

use serde::Serialize;

use ising_formfactors::formfactors::FormFactorResult;
use ising_formfactors::spectral::{Couplings, Sector, SpectralPoint};
use ising_formfactors::verify::SuiteReport;

#[derive(Debug, Serialize)]
pub struct CouplingsInput {
    pub kx: f64,
    pub ky: f64,
    pub n: usize,
}

impl CouplingsInput {
    pub fn of(c: &Couplings) -> Self {
        Self { kx: c.kx(), ky: c.ky(), n: c.n() }
    }
}

#[derive(Debug, Serialize)]
pub struct ParamsReport {
    pub kx: f64,
    pub ky: f64,
    pub n: usize,
    pub kx_star: f64,
    pub ferromagnetic: bool,
    pub k: f64,
    pub kprime: f64,
    pub big_k: f64,
    pub big_kprime: f64,
    pub nome_q: f64,
    pub eta: f64,
    pub xi: f64,
    pub xi_t: f64,
    pub rho: f64,
    pub s: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma_0: f64,
    pub gamma_pi: f64,
    pub vacuum_overlap: f64,
    pub yang_magnetization: f64,
}

impl ParamsReport {
    pub fn new(c: &Couplings) -> Self {
        let m = c.modulus();
        Self {
            kx: c.kx(),
            ky: c.ky(),
            n: c.n(),
            kx_star: c.kx_star(),
            ferromagnetic: c.kx_star() < c.ky(),
            k: m.k(),
            kprime: m.kprime(),
            big_k: m.big_k(),
            big_kprime: m.big_kprime(),
            nome_q: m.q(),
            eta: c.eta(),
            xi: c.xi(),
            xi_t: c.xi_t(),
            rho: c.rho(),
            s: c.s(),
            alpha: c.alpha(),
            beta: c.beta(),
            gamma_0: c.gamma_0(),
            gamma_pi: c.gamma_pi(),
            vacuum_overlap: ising_formfactors::formfactors::vacuum_overlap(c),
            yang_magnetization: c.yang_magnetization(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct PointRow {
    pub sector: char,
    pub index: usize,
    pub theta: f64,
    pub gamma: f64,
    pub sinh_gamma: f64,
    pub b_re: f64,
    pub b_im: f64,
    pub sqrt_b_re: f64,
    pub sqrt_b_im: f64,
    pub u: f64,
    pub nu: f64,
}

impl PointRow {
    pub fn new(sector: Sector, index: usize, p: &SpectralPoint) -> Self {
        Self {
            sector: sector.label(),
            index,
            theta: p.theta,
            gamma: p.gamma,
            sinh_gamma: p.sinh_gamma,
            b_re: p.b.re,
            b_im: p.b.im,
            sqrt_b_re: p.sqrt_b.re,
            sqrt_b_im: p.sqrt_b.im,
            u: p.u,
            nu: p.nu,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SpectrumReport {
    pub couplings: CouplingsInput,
    pub antiperiodic: Vec<PointRow>,
    pub periodic: Vec<PointRow>,
}

#[derive(Debug, Serialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
    pub abs: f64,
}

impl From<&FormFactorResult> for ComplexValue {
    fn from(r: &FormFactorResult) -> Self {
        Self { re: r.value.re, im: r.value.im, abs: r.value.norm() }
    }
}

#[derive(Debug, Serialize)]
pub struct FfEntry {
    pub site: usize,
    pub bra: Vec<usize>,
    pub ket: Vec<usize>,
    pub closed: ComplexValue,
    pub pfaffian: ComplexValue,
    /// Relative difference between the pfaffian and closed values.
    pub residual_pfaffian: f64,
    pub agree_pfaffian: bool,
    /// |⟨bra|s_l|ket⟩| from the dense transfer matrix, when N ≤ 10.
    pub oracle_abs: Option<f64>,
    pub residual_oracle: Option<f64>,
    pub agree_oracle: Option<bool>,
}

impl FfEntry {
    pub fn agrees(&self) -> bool {
        self.agree_pfaffian && self.agree_oracle.unwrap_or(true)
    }
}

#[derive(Debug, Serialize)]
pub struct FfReport {
    pub couplings: CouplingsInput,
    pub tolerance: f64,
    pub oracle_tolerance: f64,
    pub results: Vec<FfEntry>,
}

fn join(xs: &[usize]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

#[derive(Debug, Serialize)]
pub struct FfRow {
    pub kx: f64,
    pub ky: f64,
    pub n: usize,
    pub site: usize,
    pub bra: String,
    pub ket: String,
    pub closed_re: f64,
    pub closed_im: f64,
    pub closed_abs: f64,
    pub pfaffian_re: f64,
    pub pfaffian_im: f64,
    pub pfaffian_abs: f64,
    pub residual_pfaffian: f64,
    pub agree_pfaffian: bool,
    pub oracle_abs: Option<f64>,
    pub residual_oracle: Option<f64>,
    pub agree_oracle: Option<bool>,
}

impl FfReport {
    pub fn rows(&self) -> Vec<FfRow> {
        self.results
            .iter()
            .map(|e| FfRow {
                kx: self.couplings.kx,
                ky: self.couplings.ky,
                n: self.couplings.n,
                site: e.site,
                bra: join(&e.bra),
                ket: join(&e.ket),
                closed_re: e.closed.re,
                closed_im: e.closed.im,
                closed_abs: e.closed.abs,
                pfaffian_re: e.pfaffian.re,
                pfaffian_im: e.pfaffian.im,
                pfaffian_abs: e.pfaffian.abs,
                residual_pfaffian: e.residual_pfaffian,
                agree_pfaffian: e.agree_pfaffian,
                oracle_abs: e.oracle_abs,
                residual_oracle: e.residual_oracle,
                agree_oracle: e.agree_oracle,
            })
            .collect()
    }
}

#[derive(Debug, Serialize)]
pub struct CorrReport {
    pub kx: f64,
    pub ky: f64,
    pub n: usize,
    pub m_height: usize,
    pub dx: usize,
    pub dy: i64,
    pub eps_x: i8,
    pub eps_y: i8,
    pub value: f64,
    /// Bound on the error from states above the particle cutoff.
    pub tail_bound: f64,
    pub cutoff: Option<usize>,
    pub states_antiperiodic: usize,
    pub states_periodic: usize,
    pub oracle: Option<f64>,
    pub residual_oracle: Option<f64>,
    pub agree_oracle: Option<bool>,
}

#[derive(Debug, Serialize)]
pub struct CheckEntry {
    pub name: String,
    pub samples: usize,
    pub max_residual: f64,
    pub passed: bool,
}

#[derive(Debug, Serialize)]
pub struct SuiteEntry {
    pub suite: String,
    pub max_residual: f64,
    pub passed: bool,
    pub checks: Vec<CheckEntry>,
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub couplings: CouplingsInput,
    pub tolerance: f64,
    pub max_residual: f64,
    pub passed: bool,
    pub suites: Vec<SuiteEntry>,
}

#[derive(Debug, Serialize)]
pub struct CheckRow {
    pub suite: String,
    pub name: String,
    pub samples: usize,
    pub max_residual: f64,
    pub passed: bool,
}

impl VerifyReport {
    pub fn new(c: &Couplings, tolerance: f64, reports: &[SuiteReport]) -> Self {
        let suites: Vec<SuiteEntry> = reports
            .iter()
            .map(|r| SuiteEntry {
                suite: r.suite.name().to_string(),
                max_residual: r.max_residual(),
                passed: r.passed(tolerance),
                checks: r
                    .checks
                    .iter()
                    .map(|ch| CheckEntry {
                        name: ch.name.clone(),
                        samples: ch.samples,
                        max_residual: ch.max_residual,
                        passed: ch.passed(tolerance),
                    })
                    .collect(),
            })
            .collect();
        Self {
            couplings: CouplingsInput::of(c),
            tolerance,
            max_residual: suites.iter().map(|s| s.max_residual).fold(0.0, f64::max),
            passed: suites.iter().all(|s| s.passed),
            suites,
        }
    }

    pub fn rows(&self) -> Vec<CheckRow> {
        self.suites
            .iter()
            .flat_map(|s| {
                s.checks.iter().map(|ch| CheckRow {
                    suite: s.suite.clone(),
                    name: ch.name.clone(),
                    samples: ch.samples,
                    max_residual: ch.max_residual,
                    passed: ch.passed,
                })
            })
            .collect()
    }
}
