use thiserror::Error;

use crate::harmonic::HarmonicError;
use crate::profinite::ProfiniteError;
use crate::rank_one::TypeError;
use crate::ricci::FlowError;
use crate::solv3::Solv3Error;
use crate::tower::TowerError;

/// Coarse classification used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// The caller supplied input that violates an operation's contract.
    Precondition,
    /// A numerical procedure failed on otherwise valid input.
    Numeric,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Profinite(#[from] ProfiniteError),
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Tower(#[from] TowerError),
    #[error(transparent)]
    Solv3(#[from] Solv3Error),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Harmonic(#[from] HarmonicError),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Flow(e) if e.is_numeric() => ErrorKind::Numeric,
            Error::Harmonic(e) if e.is_numeric() => ErrorKind::Numeric,
            _ => ErrorKind::Precondition,
        }
    }
}
