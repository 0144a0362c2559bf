use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use super::operators::SpinOperatorSet;
use crate::error::{Error, Result};
use crate::formfactors::{subsets, FockState};
use crate::spectral::{Couplings, Sector};

pub type CVector = DVector<Complex64>;

/// Eigenvalues of V are grouped when their logarithms differ by less than this.
pub const CLUSTER_TOL: f64 = 1.0e-9;
/// Largest admissible distance of a fermionic candidate from its eigenspace.
pub const PROJECTION_TOL: f64 = 1.0e-8;

/// A simultaneous eigenvector of V, U and T labeled by its Fock state.
#[derive(Debug, Clone)]
pub struct LabeledEigenstate {
    pub vector: CVector,
    pub state: FockState,
    /// ln of the V eigenvalue.
    pub energy: f64,
    /// The U eigenvalue, ±1.
    pub charge: f64,
    /// ⟨v|T|v⟩.
    pub translation: Complex64,
}

impl LabeledEigenstate {
    pub fn sector(&self) -> Sector {
        self.state.sector()
    }
}

/// The Fock vacua of both sectors, taken from the ε_y = +1 transfer matrix.
#[derive(Debug, Clone)]
pub struct Vacua {
    pub antiperiodic: CVector,
    pub periodic: CVector,
}

/// A Fock state with its predicted ln V eigenvalue and U charge.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictedLevel {
    pub state: FockState,
    pub energy: f64,
    pub charge: f64,
}

/// The V spectrum predicted for boundary sign ε_y: even-particle states for
/// ε_y = +1, odd ones for ε_y = −1, in both sectors.
pub fn predicted_spectrum(c: &Couplings, eps_y: i8) -> Vec<PredictedLevel> {
    let n = c.n();
    let log_scale = 0.5 * n as f64 * (2.0 * c.sinh_2kx()).ln();
    let parity = if eps_y == 1 { 0 } else { 1 };
    let mut out = Vec::new();
    for (sector, vac_charge) in [(Sector::Antiperiodic, 1.0), (Sector::Periodic, -1.0)] {
        let pts = c.points(sector);
        let vac = log_scale + 0.5 * pts.iter().map(|p| p.gamma).sum::<f64>();
        for k in (parity..=n).step_by(2) {
            for idx in subsets(n, k) {
                let energy = vac - idx.iter().map(|&i| pts[i].gamma).sum::<f64>();
                let charge = if k % 2 == 0 { vac_charge } else { -vac_charge };
                out.push(PredictedLevel { state: FockState::new(sector, n, idx).expect("valid subset"), energy, charge });
            }
        }
    }
    out
}

/// Eigen-decomposition of V through the symmetric matrix V/s − sV⁻¹, whose
/// eigenvalues 2 sinh(ln(λ/s)) resolve every part of the spectrum to the
/// same relative accuracy. Returns (ln λ, eigenvectors), sorted by descending ln λ.
pub fn log_eigensystem(ops: &SpinOperatorSet) -> (Vec<f64>, DMatrix<f64>) {
    let a = ops.reduced_v() - ops.reduced_v_inverse();
    let eig = SymmetricEigen::new(a);
    let mut order: Vec<usize> = (0..ops.dim()).collect();
    let logs: Vec<f64> = eig.eigenvalues.iter().map(|y| (0.5 * y).asinh() + ops.log_scale()).collect();
    order.sort_by(|&i, &j| logs[j].total_cmp(&logs[i]));
    let vectors = DMatrix::from_fn(ops.dim(), ops.dim(), |r, col| eig.eigenvectors[(r, order[col])]);
    (order.iter().map(|&i| logs[i]).collect(), vectors)
}

fn to_complex(v: nalgebra::DVectorView<'_, f64>) -> CVector {
    v.map(|x| Complex64::new(x, 0.0))
}

fn apply_permutation(map: &[usize], v: &CVector) -> CVector {
    CVector::from_fn(v.len(), |b, _| v[map[b]])
}

/// ψ†_θ applied to a vector: ½(e^{−iθ}√b_θ P_θ − i Q_θ/√b_θ), with P_θ, Q_θ the
/// Fourier sums of the Jordan–Wigner Majorana operators.
pub fn apply_creation(c: &Couplings, theta: f64, v: &CVector) -> Result<CVector> {
    let n = c.n();
    let sqrt_b = c.sqrt_b(theta)?;
    let norm = 1.0 / (n as f64).sqrt();
    let p_coef = 0.5 * Complex64::from_polar(norm, -theta) * sqrt_b;
    let q_coef = Complex64::new(0.0, -0.5 * norm) / sqrt_b;
    let mut out = CVector::zeros(v.len());
    for j in 0..n {
        let phase = Complex64::from_polar(1.0, j as f64 * theta);
        let below = (1usize << j) - 1;
        let through = (1usize << (j + 1)) - 1;
        let pc = p_coef * phase;
        let qc = q_coef * phase * Complex64::new(0.0, -1.0);
        for b in 0..v.len() {
            let s = if b >> j & 1 == 1 { -1.0 } else { 1.0 };
            out[b] += s * (pc * v[b ^ below] + qc * v[b ^ through]);
        }
    }
    Ok(out)
}

/// ψ†_{θ_1} ⋯ ψ†_{θ_m} |vac⟩ for the state's momenta in ascending order.
pub fn fock_vector(c: &Couplings, vacua: &Vacua, state: &FockState) -> Result<CVector> {
    let mut v = match state.sector() {
        Sector::Antiperiodic => vacua.antiperiodic.clone(),
        Sector::Periodic => vacua.periodic.clone(),
    };
    for theta in state.thetas().into_iter().rev() {
        v = apply_creation(c, theta, &v)?;
    }
    Ok(v)
}

/// Vacua read off an ε_y = +1 eigensystem: the top state of each U charge.
pub fn vacua_from_eigensystem(ops: &SpinOperatorSet, vectors: &DMatrix<f64>) -> Result<Vacua> {
    if ops.eps_y() != 1 {
        return Err(Error::Precondition("vacua are read from the eps_y = +1 transfer matrix".into()));
    }
    let flip = ops.flip_map();
    let mut a = None;
    let mut p = None;
    for col in 0..vectors.ncols() {
        let v = vectors.column(col);
        let u: f64 = (0..v.len()).map(|b| v[b] * v[flip[b]]).sum();
        if u > 0.5 && a.is_none() {
            a = Some(to_complex(v));
        } else if u < -0.5 && p.is_none() {
            p = Some(to_complex(v));
        }
        if a.is_some() && p.is_some() {
            break;
        }
    }
    match (a, p) {
        (Some(antiperiodic), Some(periodic)) => Ok(Vacua { antiperiodic, periodic }),
        _ => Err(Error::Ambiguity("could not identify both vacua".into())),
    }
}

/// Diagonalizes V, splits clusters of equal eigenvalue by U, and labels each
/// state by its Fock quantum numbers. States that stay degenerate after the
/// U split are resolved by projecting explicit fermionic Fock vectors, built
/// on `vacua`, onto the numerically found eigenspace.
pub fn labeled_spectrum(ops: &SpinOperatorSet, c: &Couplings, vacua: Option<&Vacua>) -> Result<Vec<LabeledEigenstate>> {
    if ops.n() != c.n() {
        return Err(Error::Precondition(format!("operators for N = {} used with N = {}", ops.n(), c.n())));
    }
    let (logs, vectors) = log_eigensystem(ops);
    let own_vacua;
    let vacua = match vacua {
        Some(v) => v,
        None => {
            own_vacua = vacua_from_eigensystem(ops, &vectors)?;
            &own_vacua
        }
    };
    let mut predicted = predicted_spectrum(c, ops.eps_y());
    predicted.sort_by(|x, y| y.energy.total_cmp(&x.energy));
    if predicted.len() != ops.dim() {
        return Err(Error::Ambiguity(format!("{} predicted levels for dimension {}", predicted.len(), ops.dim())));
    }
    let u = ops.u_matrix();
    let mut out = Vec::with_capacity(ops.dim());
    let mut start = 0;
    while start < logs.len() {
        let mut end = start + 1;
        while end < logs.len() && (logs[end - 1] - logs[end]).abs() < CLUSTER_TOL * logs[end].abs().max(1.0) {
            end += 1;
        }
        let energy = logs[start..end].iter().sum::<f64>() / (end - start) as f64;
        let q = vectors.columns(start, end - start).into_owned();
        let reduced_u = q.transpose() * &u * &q;
        let ueig = SymmetricEigen::new(reduced_u);
        for charge in [1.0, -1.0] {
            let cols: Vec<usize> = (0..end - start).filter(|&i| (ueig.eigenvalues[i] - charge).abs() < 1e-6).collect();
            if cols.is_empty() {
                continue;
            }
            let basis = DMatrix::from_fn(q.nrows(), cols.len(), |r, k| (&q * ueig.eigenvectors.column(cols[k]))[r]);
            let labels: Vec<&PredictedLevel> = predicted
                .iter()
                .filter(|p| p.charge == charge && (p.energy - energy).abs() < 1e2 * CLUSTER_TOL * energy.abs().max(1.0))
                .collect();
            if labels.len() != cols.len() {
                return Err(Error::Ambiguity(format!(
                    "eigenvalue ln = {energy} with U = {charge}: {} states but {} predicted labels",
                    cols.len(),
                    labels.len()
                )));
            }
            if labels.len() == 1 {
                let v = to_complex(basis.column(0));
                out.push(finish(ops, v, labels[0].state.clone(), energy, charge));
                continue;
            }
            let basis_c = basis.map(|x| Complex64::new(x, 0.0));
            for label in labels {
                let cand = fock_vector(c, vacua, &label.state)?;
                let norm = cand.norm();
                let proj = &basis_c * (basis_c.adjoint() * &cand);
                let residual = (&cand - &proj).norm() / norm;
                if !(residual < PROJECTION_TOL) {
                    return Err(Error::Ambiguity(format!(
                        "Fock vector {} leaves its eigenspace (residual {residual:e})",
                        label.state
                    )));
                }
                let v = &proj / Complex64::new(proj.norm(), 0.0);
                out.push(finish(ops, v, label.state.clone(), energy, charge));
            }
        }
        start = end;
    }
    Ok(out)
}

fn finish(ops: &SpinOperatorSet, vector: CVector, state: FockState, energy: f64, charge: f64) -> LabeledEigenstate {
    let tv = apply_permutation(ops.shift_map(), &vector);
    let translation = vector.dotc(&tv);
    LabeledEigenstate { vector, state, energy, charge, translation }
}

/// |⟨bra|s_l|ket⟩| between two labeled eigenvectors.
pub fn matrix_element_modulus(ops: &SpinOperatorSet, l: usize, bra: &LabeledEigenstate, ket: &LabeledEigenstate) -> f64 {
    let s = ops.spin_diagonal(l);
    let mut acc = Complex64::new(0.0, 0.0);
    for b in 0..s.len() {
        acc += bra.vector[b].conj() * s[b] * ket.vector[b];
    }
    acc.norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn full_spectrum_is_labeled() {
        for n in 1..=5 {
            for &(kx, ky) in &[(0.3, 0.9), (0.5, 0.5), (0.7, 0.8)] {
                let c = Couplings::new(n, kx, ky).unwrap();
                let plus = SpinOperatorSet::new(&c, 1).unwrap();
                let spec = labeled_spectrum(&plus, &c, None).unwrap();
                assert_eq!(spec.len(), 1 << n);
                let (_, vecs) = log_eigensystem(&plus);
                let vac = vacua_from_eigensystem(&plus, &vecs).unwrap();
                let minus = SpinOperatorSet::new(&c, -1).unwrap();
                let spec_m = labeled_spectrum(&minus, &c, Some(&vac)).unwrap();
                assert_eq!(spec_m.len(), 1 << n);
                assert!(spec_m.iter().all(|s| s.state.len() % 2 == 1));
            }
        }
    }

    #[test]
    fn vacuum_and_translation_eigenvalues() {
        let c = Couplings::new(4, 0.4, 0.7).unwrap();
        let ops = SpinOperatorSet::new(&c, 1).unwrap();
        let spec = labeled_spectrum(&ops, &c, None).unwrap();
        assert!(spec[0].state.is_empty() && spec[0].sector() == Sector::Antiperiodic && spec[0].charge == 1.0);
        for s in &spec {
            let total: f64 = s.state.thetas().iter().sum();
            let expected = Complex64::from_polar(1.0, -total);
            assert!((s.translation - expected).norm() < 1e-8, "{}: {}", s.state, s.translation);
        }
    }

    #[test]
    fn predicted_energies_match_dense_eigenvalues() {
        let c = Couplings::new(3, 0.4, 0.7).unwrap();
        let ops = SpinOperatorSet::new(&c, 1).unwrap();
        let dense = SymmetricEigen::new(ops.v()).eigenvalues;
        let mut d: Vec<f64> = dense.iter().map(|x| x.ln()).collect();
        d.sort_by(|a, b| b.total_cmp(a));
        let mut p: Vec<f64> = predicted_spectrum(&c, 1).iter().map(|l| l.energy).collect();
        p.sort_by(|a, b| b.total_cmp(a));
        for (a, b) in d.iter().zip(&p) {
            assert!((a - b).abs() < 1e-9);
        }
        let _ = TAU;
    }
}
