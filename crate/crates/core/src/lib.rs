pub mod cauchy;
pub mod elliptic;
pub mod error;
pub mod formfactors;
pub mod linalg;
pub mod oracle;
pub mod spectral;
pub mod verify;

pub use error::{Error, ErrorKind, Result};
