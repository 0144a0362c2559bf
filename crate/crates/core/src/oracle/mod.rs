//! Brute-force 2^N transfer-matrix oracle: dense operators, a labeled
//! eigenbasis, spin matrix elements and trace-ratio correlations.

mod correlation;
mod facade;
mod operators;
mod spectrum;

pub use correlation::{oracle_correlation, spectral_trace_residual, MAX_CORRELATION_HEIGHT, MAX_CORRELATION_WIDTH};
pub use facade::{oracle_ff_modulus, Oracle};
pub use operators::{SpinOperatorSet, SymmetryResiduals, MAX_ORACLE_WIDTH};
pub use spectrum::{
    apply_creation, fock_vector, labeled_spectrum, log_eigensystem, matrix_element_modulus, predicted_spectrum,
    vacua_from_eigensystem, CVector, LabeledEigenstate, PredictedLevel, Vacua, CLUSTER_TOL, PROJECTION_TOL,
};
