//! Induced rotations, two-particle matrices, multiparticle form factors and
//! two-point correlation functions.

mod correlation;
mod multi;
mod rotation;
mod state;

pub use correlation::{
    two_point_correlation, two_point_correlation_with, CorrelationParams, CorrelationResult, DEFAULT_CUTOFF,
    FULL_SUM_MAX_WIDTH,
};
pub use multi::{
    elliptic_pairing_matrix, ff_closed, ff_pfaffian, ff_pfaffian_with, i_power, pairing_matrix, FormFactorResult,
    Provenance,
};
pub use rotation::{
    abs_det_d_closed, abs_det_d_elliptic, vacuum_overlap, InducedRotation, RotationResiduals, TwoParticleMatrices,
    TwoParticleSource,
};
pub use state::{subsets, FockState, FormFactorSpec};
