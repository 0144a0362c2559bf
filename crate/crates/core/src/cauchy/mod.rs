//! Elliptic Cauchy matrices: Frobenius determinant and inverse, theta-function
//! interpolation, and the closed forms of Φ⁻¹, ΨΦ⁻¹, Φ⁻¹Ψ for the Ising point sets.

mod frobenius;
mod ising;

pub use frobenius::{
    frobenius_det, frobenius_inverse, frobenius_matrix, sn_determinant, sn_pfaffian_product, sn_skew_matrix,
    theta_interpolation_sum, theta_interpolation_terms, DnSnCauchy, EllipticPointConfig,
};
pub use ising::*;
