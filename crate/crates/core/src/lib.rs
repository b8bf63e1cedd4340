//! Two-point-measurement laboratory for finite-dimensional quantum systems.
//!
//! Build a [`tpm::TpmExperiment`] (state, first projective measurement, CPTP
//! channel, second projective measurement), evaluate its exact joint outcome
//! distribution, and check the exponential identities it satisfies:
//! ⟨e^{−I}⟩ = 1 for the single-trial mutual information I_nm, and
//! ⟨e^{−βW}⟩ = Z'/Z for the work W = E'_m − E_n when the state is thermal and
//! the evolution is unitary. [`sampler`] estimates the same averages by Monte
//! Carlo; [`cli`] drives everything from JSON scenario files.

#![forbid(unsafe_code)]

pub mod batch;
pub mod cli;
pub mod linalg;
pub mod quantum;
pub mod random;
pub mod sampler;
pub mod table;
pub mod tpm;

use thiserror::Error;

pub use linalg::{ComplexMatrix, EigenDecomposition};
pub use quantum::{DensityMatrix, GibbsEnsemble, KrausChannel, ProjectorFamily};
pub use table::Table;
pub use tpm::{JointDistribution, MutualInformationTable, TpmExperiment, WorkStatistics};

/// Any failure from the library layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Linalg(#[from] linalg::LinalgError),
    #[error(transparent)]
    Quantum(#[from] quantum::QuantumError),
    #[error(transparent)]
    Tpm(#[from] tpm::TpmError),
    #[error(transparent)]
    Sampler(#[from] sampler::SamplerError),
}
