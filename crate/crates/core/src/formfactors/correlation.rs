use num_complex::Complex64;

use super::multi::closed_value;
use super::state::subsets;
use crate::error::{Error, Result};
use crate::spectral::{Couplings, Sector, SpectralPoint};

/// Widths up to which the full Fock basis is summed when no cutoff is given.
pub const FULL_SUM_MAX_WIDTH: usize = 10;
/// Particle-number cutoff used above [`FULL_SUM_MAX_WIDTH`].
pub const DEFAULT_CUTOFF: usize = 4;
const MAX_PAIRS: usize = 50_000_000;

/// ⟨σ_{0,0} σ_{dx,dy}⟩ on an M × N torus with boundary twists ε_x, ε_y.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorrelationParams {
    pub m_height: usize,
    pub dx: usize,
    pub dy: i64,
    pub eps_x: i8,
    pub eps_y: i8,
}

impl CorrelationParams {
    pub fn new(m_height: usize, dx: usize, dy: i64, eps_x: i8, eps_y: i8) -> Result<Self> {
        if m_height == 0 || dx > m_height {
            return Err(Error::Domain(format!("need 0 <= dx <= M with M > 0, got dx = {dx}, M = {m_height}")));
        }
        if eps_x.abs() != 1 || eps_y.abs() != 1 {
            return Err(Error::Domain(format!("boundary signs must be ±1, got {eps_x}, {eps_y}")));
        }
        Ok(Self { m_height, dx, dy, eps_x, eps_y })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationResult {
    pub value: f64,
    /// Upper bound on |exact − value| from the omitted states; zero for full sums.
    pub tail_bound: f64,
    pub cutoff: Option<usize>,
    pub states_antiperiodic: usize,
    pub states_periodic: usize,
}

impl CorrelationResult {
    pub fn truncated(&self) -> bool {
        self.cutoff.is_some()
    }
}

struct SectorStates<'a> {
    states: Vec<Vec<&'a SpectralPoint>>,
    /// E_S − E_max for each state.
    log_weights: Vec<f64>,
    vacuum_log_weight: f64,
    gammas: Vec<f64>,
    parity: usize,
    charge: f64,
}

impl<'a> SectorStates<'a> {
    fn new(c: &'a Couplings, sector: Sector, parity: usize, cutoff: usize, e_max: f64, charge: f64) -> Self {
        let pts = c.points(sector);
        let vac = 0.5 * pts.iter().map(|p| p.gamma).sum::<f64>() - e_max;
        let mut states = Vec::new();
        let mut log_weights = Vec::new();
        for k in (parity..=cutoff.min(c.n())).step_by(2) {
            for idx in subsets(c.n(), k) {
                let s: Vec<&SpectralPoint> = idx.iter().map(|&i| &pts[i]).collect();
                log_weights.push(vac - s.iter().map(|p| p.gamma).sum::<f64>());
                states.push(s);
            }
        }
        Self {
            states,
            log_weights,
            vacuum_log_weight: vac,
            gammas: pts.iter().map(|p| p.gamma).collect(),
            parity,
            charge,
        }
    }

    /// Σ over physical states with more than `cutoff` particles (or all when
    /// `cutoff` is None) of w_S^power.
    fn power_sum(&self, power: f64, cutoff: Option<usize>) -> f64 {
        let n = self.gammas.len();
        let mut e = vec![0.0; n + 1];
        e[0] = 1.0;
        for &g in &self.gammas {
            let x = (-power * g).exp();
            for k in (1..=n).rev() {
                e[k] += x * e[k - 1];
            }
        }
        let start = match cutoff {
            Some(c) => c + 1,
            None => 0,
        };
        let sum: f64 = (start..=n).filter(|k| k % 2 == self.parity).map(|k| e[k]).sum();
        (power * self.vacuum_log_weight).exp() * sum
    }
}

/// Number of subsets of {0..n} with size ≡ parity (mod 2) and at most `limit`.
fn state_count(n: usize, parity: usize, limit: usize) -> usize {
    let mut binom = 1usize;
    let mut total = 0usize;
    for k in 0..=limit.min(n) {
        if let Some(next) = binom.saturating_mul(n + 1 - k.max(1)).checked_div(k) {
            binom = next;
        }
        if k % 2 == parity {
            total = total.saturating_add(binom);
        }
    }
    total
}

/// Spectral form-factor sum for ⟨σ_{0,0} σ_{dx,dy}⟩ on the M × N torus.
///
/// The full Fock basis is used for N ≤ 10 unless `cutoff` is given; above
/// that the default particle cutoff applies and a rigorous tail bound is
/// reported.
pub fn two_point_correlation_with(c: &Couplings, p: CorrelationParams, cutoff: Option<usize>) -> Result<CorrelationResult> {
    let n = c.n();
    let cutoff = match cutoff {
        Some(k) if k >= n => None,
        Some(k) => Some(k),
        None if n <= FULL_SUM_MAX_WIDTH => None,
        None => Some(DEFAULT_CUTOFF),
    };
    let parity = if p.eps_y == 1 { 0 } else { 1 };
    let ea = 0.5 * c.points(Sector::Antiperiodic).iter().map(|q| q.gamma).sum::<f64>();
    let ep = 0.5 * c.points(Sector::Periodic).iter().map(|q| q.gamma).sum::<f64>();
    let e_max = ea.max(ep);
    let eps_y = p.eps_y as f64;
    let limit = cutoff.unwrap_or(n);
    let per_sector = state_count(n, parity, limit);
    if per_sector.saturating_mul(per_sector) > MAX_PAIRS {
        return Err(Error::Resource(format!(
            "{per_sector} x {per_sector} intermediate state pairs; supply a smaller particle cutoff"
        )));
    }
    let a = SectorStates::new(c, Sector::Antiperiodic, parity, limit, e_max, eps_y);
    let b = SectorStates::new(c, Sector::Periodic, parity, limit, e_max, -eps_y);
    let insert_u = p.eps_x == -1;
    let charge = |s: &SectorStates| if insert_u { s.charge } else { 1.0 };
    let m = p.m_height as f64;
    let dx = p.dx as f64;
    let l = p.dy.rem_euclid(n as i64) as usize;
    let wraps = p.dy.div_euclid(n as i64);
    let wrap_sign = if p.eps_y == -1 && wraps % 2 != 0 { -1.0 } else { 1.0 };

    let denominator = charge(&a) * a.power_sum(m, None) + charge(&b) * b.power_sum(m, None);
    if denominator == 0.0 || !denominator.is_finite() {
        return Err(Error::Singular(0.0));
    }

    let mut numerator = 0.0;
    for (sa, &wa) in a.states.iter().zip(&a.log_weights) {
        let pa: f64 = sa.iter().map(|q| q.theta).sum();
        for (sb, &wb) in b.states.iter().zip(&b.log_weights) {
            let f = closed_value(c, 0, sa, sb).norm_sqr();
            if f == 0.0 {
                continue;
            }
            let pm: f64 = sb.iter().map(|q| q.theta).sum::<f64>() - pa;
            let phase = Complex64::from_polar(1.0, l as f64 * pm);
            let t1 = phase.conj() * (dx * wb + (m - dx) * wa).exp() * charge(&a);
            let t2 = phase * (dx * wa + (m - dx) * wb).exp() * charge(&b);
            numerator += f * (t1 + t2).re;
        }
    }

    let tail_bound = match cutoff {
        None => 0.0,
        Some(k) => {
            let bound = |f: &SectorStates, fp: f64, g: &SectorStates, gp: f64| {
                let fo = f.power_sum(2.0 * fp, Some(k)).sqrt();
                let fa = f.power_sum(2.0 * fp, None).sqrt();
                let go = g.power_sum(2.0 * gp, Some(k)).sqrt();
                let ga = g.power_sum(2.0 * gp, None).sqrt();
                fo * ga + fa * go
            };
            (bound(&a, m - dx, &b, dx) + bound(&b, m - dx, &a, dx)) / denominator.abs()
        }
    };

    Ok(CorrelationResult {
        value: wrap_sign * numerator / denominator,
        tail_bound,
        cutoff,
        states_antiperiodic: a.states.len(),
        states_periodic: b.states.len(),
    })
}

/// [`two_point_correlation_with`] with the default cutoff policy.
pub fn two_point_correlation(
    c: &Couplings,
    m_height: usize,
    dx: usize,
    dy: i64,
    eps_x: i8,
    eps_y: i8,
) -> Result<CorrelationResult> {
    two_point_correlation_with(c, CorrelationParams::new(m_height, dx, dy, eps_x, eps_y)?, None)
}
