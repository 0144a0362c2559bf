//! Theta functions, complete elliptic integrals and Jacobi elliptic functions.

mod integrals;
mod jacobi;
mod theta;

pub use integrals::{agm, carlson_rf, complete_elliptic_k};
pub use jacobi::{inverse_sn_real, jacobi_sn_cn_dn, EllipticModulus};
pub use theta::{theta, ThetaIndex};
