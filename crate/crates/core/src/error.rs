use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("couplings are not ferromagnetic: K*_x = {kx_star} must be below K_y = {ky}")]
    NotFerromagnetic { kx_star: f64, ky: f64 },

    #[error("couplings too close to criticality: K'/K = {ratio:e} is below {limit:e}")]
    NearCritical { ratio: f64, limit: f64 },

    #[error("series or iteration failed to converge: {0}")]
    Convergence(String),

    #[error("argument {0} is too close to a pole")]
    PoleProximity(String),

    #[error("square root requested on the branch cut: {0}")]
    BranchCut(String),

    #[error("matrix is singular to working tolerance (pivot ratio {0:e})")]
    Singular(f64),

    #[error("matrix is not skew-symmetric (deviation {0:e})")]
    NotSkewSymmetric(f64),

    #[error("invalid Fock state: {0}")]
    InvalidState(String),

    #[error("selection rule violated: m + n = {0} is odd")]
    SelectionRule(usize),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("spectrum labeling is ambiguous: {0}")]
    Ambiguity(String),

    #[error("state not present in the labeled spectrum: {0}")]
    Unlabeled(String),
}

/// Coarse grouping of [`Error`] used by front ends to choose exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    Numerical,
    Resource,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Domain(_)
            | Error::NotFerromagnetic { .. }
            | Error::NearCritical { .. }
            | Error::InvalidState(_)
            | Error::SelectionRule(_)
            | Error::Precondition(_)
            | Error::NotSkewSymmetric(_)
            | Error::Unlabeled(_) => ErrorKind::Input,
            Error::Resource(_) => ErrorKind::Resource,
            Error::Convergence(_)
            | Error::PoleProximity(_)
            | Error::BranchCut(_)
            | Error::Singular(_)
            | Error::Ambiguity(_) => ErrorKind::Numerical,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
