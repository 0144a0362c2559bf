use std::collections::HashMap;

use super::correlation::oracle_correlation;
use super::operators::SpinOperatorSet;
use super::spectrum::{labeled_spectrum, log_eigensystem, matrix_element_modulus, vacua_from_eigensystem, LabeledEigenstate};
use crate::error::{Error, Result};
use crate::formfactors::{FockState, FormFactorSpec};
use crate::spectral::Couplings;

/// |⟨bra|s_l|ket⟩| looked up in one labeled spectrum.
pub fn oracle_ff_modulus(ops: &SpinOperatorSet, spectrum: &[LabeledEigenstate], spec: &FormFactorSpec) -> Result<f64> {
    let find = |s: &FockState| {
        spectrum
            .iter()
            .find(|e| &e.state == s)
            .ok_or_else(|| Error::Unlabeled(format!("{s} (eps_y = {})", ops.eps_y())))
    };
    Ok(matrix_element_modulus(ops, spec.site(), find(spec.bra())?, find(spec.ket())?))
}

/// Labeled eigenbases of both boundary signs: even-particle states live in
/// the ε_y = +1 spectrum, odd-particle states in the ε_y = −1 spectrum.
#[derive(Debug, Clone)]
pub struct Oracle {
    even: SpinOperatorSet,
    odd: SpinOperatorSet,
    even_states: Vec<LabeledEigenstate>,
    odd_states: Vec<LabeledEigenstate>,
    index: HashMap<FockState, usize>,
}

impl Oracle {
    pub fn new(c: &Couplings) -> Result<Self> {
        let even = SpinOperatorSet::new(c, 1)?;
        let odd = SpinOperatorSet::new(c, -1)?;
        let (_, vectors) = log_eigensystem(&even);
        let vacua = vacua_from_eigensystem(&even, &vectors)?;
        let even_states = labeled_spectrum(&even, c, Some(&vacua))?;
        let odd_states = labeled_spectrum(&odd, c, Some(&vacua))?;
        let index = even_states
            .iter()
            .chain(&odd_states)
            .enumerate()
            .map(|(i, s)| (s.state.clone(), i))
            .collect();
        Ok(Self { even, odd, even_states, odd_states, index })
    }

    pub fn operators(&self, eps_y: i8) -> &SpinOperatorSet {
        if eps_y == 1 {
            &self.even
        } else {
            &self.odd
        }
    }

    pub fn spectrum(&self, eps_y: i8) -> &[LabeledEigenstate] {
        if eps_y == 1 {
            &self.even_states
        } else {
            &self.odd_states
        }
    }

    pub fn state(&self, s: &FockState) -> Result<&LabeledEigenstate> {
        let i = *self.index.get(s).ok_or_else(|| Error::Unlabeled(s.to_string()))?;
        Ok(if i < self.even_states.len() { &self.even_states[i] } else { &self.odd_states[i - self.even_states.len()] })
    }

    /// |⟨bra|s_l|ket⟩| for any two Fock states of equal particle-number parity.
    pub fn matrix_element_modulus(&self, l: usize, bra: &FockState, ket: &FockState) -> Result<f64> {
        if bra.len() % 2 != ket.len() % 2 {
            return Err(Error::Precondition(format!("{bra} and {ket} are eigenstates of different transfer matrices")));
        }
        let ops = self.operators(if bra.len() % 2 == 0 { 1 } else { -1 });
        if l >= ops.n() {
            return Err(Error::Domain(format!("site {l} out of range")));
        }
        Ok(matrix_element_modulus(ops, l, self.state(bra)?, self.state(ket)?))
    }

    pub fn ff_modulus(&self, spec: &FormFactorSpec) -> Result<f64> {
        self.matrix_element_modulus(spec.site(), spec.bra(), spec.ket())
    }

    pub fn correlation(&self, m_height: usize, dx: usize, dy: i64, eps_x: i8, eps_y: i8) -> Result<f64> {
        oracle_correlation(self.operators(eps_y), m_height, dx, dy, eps_x)
    }
}
