use std::fmt;

use crate::error::{Error, Result};
use crate::spectral::{Momentum, Sector};

/// A Fock state of one sector: distinct quasimomenta addressed by index, in
/// ascending order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FockState {
    sector: Sector,
    n: usize,
    indices: Vec<usize>,
}

impl FockState {
    pub fn new(sector: Sector, n: usize, indices: Vec<usize>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidState("lattice width must be positive".into()));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= n) {
            return Err(Error::InvalidState(format!("momentum index {bad} out of range for N = {n}")));
        }
        for w in indices.windows(2) {
            if w[0] == w[1] {
                return Err(Error::InvalidState(format!("momentum index {} repeated", w[0])));
            }
            if w[0] > w[1] {
                return Err(Error::InvalidState(format!("momentum indices {indices:?} not ascending")));
            }
        }
        Ok(Self { sector, n, indices })
    }

    pub fn vacuum(sector: Sector, n: usize) -> Self {
        Self { sector, n, indices: Vec::new() }
    }

    /// The state with the given index subset, given as a bit mask.
    pub fn from_mask(sector: Sector, n: usize, mask: u64) -> Self {
        let indices = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        Self { sector, n, indices }
    }

    pub fn sector(&self) -> Sector {
        self.sector
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn mask(&self) -> u64 {
        self.indices.iter().fold(0, |m, &i| m | 1 << i)
    }

    pub fn momenta(&self) -> Vec<Momentum> {
        self.indices
            .iter()
            .map(|&index| Momentum { sector: self.sector, index, n: self.n })
            .collect()
    }

    pub fn thetas(&self) -> Vec<f64> {
        self.momenta().iter().map(Momentum::theta).collect()
    }

    /// Σθ in units of π/N, as an exact integer.
    pub fn momentum_numerator(&self) -> usize {
        self.momenta().iter().map(Momentum::numerator).sum()
    }
}

impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:?}", self.sector, self.indices)
    }
}

/// A spin matrix element ⟨bra|s_l|ket⟩ with the bra in the antiperiodic and the
/// ket in the periodic sector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FormFactorSpec {
    site: usize,
    bra: FockState,
    ket: FockState,
}

impl FormFactorSpec {
    pub fn new(site: usize, bra: FockState, ket: FockState) -> Result<Self> {
        if bra.sector != Sector::Antiperiodic || ket.sector != Sector::Periodic {
            return Err(Error::InvalidState(format!(
                "bra must be antiperiodic and ket periodic, got {} and {}",
                bra.sector, ket.sector
            )));
        }
        if bra.n != ket.n {
            return Err(Error::InvalidState(format!("widths differ: {} vs {}", bra.n, ket.n)));
        }
        if site >= bra.n {
            return Err(Error::InvalidState(format!("site {site} out of range for N = {}", bra.n)));
        }
        if (bra.len() + ket.len()) % 2 == 1 {
            return Err(Error::SelectionRule(bra.len() + ket.len()));
        }
        Ok(Self { site, bra, ket })
    }

    /// Builds a spec from index lists.
    pub fn from_indices(n: usize, site: usize, bra: &[usize], ket: &[usize]) -> Result<Self> {
        Self::new(
            site,
            FockState::new(Sector::Antiperiodic, n, bra.to_vec())?,
            FockState::new(Sector::Periodic, n, ket.to_vec())?,
        )
    }

    pub fn site(&self) -> usize {
        self.site
    }

    pub fn bra(&self) -> &FockState {
        &self.bra
    }

    pub fn ket(&self) -> &FockState {
        &self.ket
    }

    pub fn n(&self) -> usize {
        self.bra.n
    }

    pub fn with_site(&self, site: usize) -> Result<Self> {
        Self::new(site, self.bra.clone(), self.ket.clone())
    }

    /// All specs with m + n = total for one site, bra and ket in index order.
    pub fn enumerate(n: usize, site: usize, total: usize) -> Vec<Self> {
        let mut out = Vec::new();
        for m in 0..=total.min(n) {
            let k = total - m;
            if k > n {
                continue;
            }
            for bra in subsets(n, m) {
                for ket in subsets(n, k) {
                    if let Ok(spec) = Self::from_indices(n, site, &bra, &ket) {
                        out.push(spec);
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for FormFactorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}|s_{}|{}>", self.bra, self.site, self.ket)
    }
}

/// The k-element subsets of 0..n in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(FockState::new(Sector::Periodic, 4, vec![0, 2]).is_ok());
        assert!(matches!(FockState::new(Sector::Periodic, 4, vec![1, 1]), Err(Error::InvalidState(_))));
        assert!(FockState::new(Sector::Periodic, 4, vec![2, 1]).is_err());
        assert!(FockState::new(Sector::Periodic, 4, vec![4]).is_err());
        assert!(matches!(FormFactorSpec::from_indices(4, 0, &[0], &[]), Err(Error::SelectionRule(1))));
        assert!(FormFactorSpec::from_indices(4, 4, &[], &[]).is_err());
        let a = FockState::vacuum(Sector::Antiperiodic, 3);
        assert!(FormFactorSpec::new(0, a.clone(), a).is_err());
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(subsets(6, 3).len(), 20);
        assert_eq!(FormFactorSpec::enumerate(4, 0, 2).len(), 6 + 16 + 6);
        assert_eq!(FormFactorSpec::enumerate(1, 0, 2).len(), 1);
    }

    #[test]
    fn mask_roundtrip() {
        let s = FockState::new(Sector::Antiperiodic, 5, vec![0, 3, 4]).unwrap();
        assert_eq!(FockState::from_mask(Sector::Antiperiodic, 5, s.mask()), s);
        assert_eq!(s.momentum_numerator(), 1 + 7 + 9);
    }
}
