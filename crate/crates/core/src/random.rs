//! Seeded random scenarios for property checks, sweeps and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{self, ComplexMatrix};
use crate::quantum::{self, DensityMatrix, GibbsEnsemble, ProjectorFamily};
use crate::tpm::TpmExperiment;
use crate::Error;

/// The generator used everywhere a seed appears.
pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mixes a base seed with a stream index (splitmix64 finalizer).
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// GUE-like Hermitian matrix (G + G†)/2 scaled by `scale`.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, scale: f64, rng: &mut R) -> Result<ComplexMatrix, Error> {
    let g = linalg::ginibre(dim, dim, rng)?;
    Ok(g.hermitian_part().scale_real(scale))
}

/// Random Hermitian matrix with spectrum shifted and scaled onto [0, 1], so
/// the ground energy is 0 and Z lies in [1, dim] for every β > 0.
pub fn random_hamiltonian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<ComplexMatrix, Error> {
    let h = random_hermitian(dim, 1.0, rng)?;
    let eig = linalg::hermitian_eig(&h, 1e-10)?;
    let (lo, hi) = (eig.eigenvalues[0], eig.eigenvalues[dim - 1]);
    let spread = if hi > lo { hi - lo } else { 1.0 };
    let shifted = eig.reconstruct_with(&eig.eigenvalues.iter().map(|&e| ((e - lo) / spread).into()).collect::<Vec<_>>());
    Ok(shifted.hermitian_part())
}

/// Full-rank state G G† / tr(G G†).
pub fn random_density_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<DensityMatrix, Error> {
    let g = linalg::ginibre(dim, dim, rng)?;
    let w = g.matmul(&g.adjoint()).hermitian_part();
    let tr = w.trace().re;
    Ok(DensityMatrix::new(w.scale_real(1.0 / tr))?)
}

/// Rank-1 projectors onto a Haar-random orthonormal basis.
pub fn random_basis<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<ProjectorFamily, Error> {
    let u = linalg::haar_random_unitary(dim, rng)?;
    Ok(ProjectorFamily::from_basis(&u, None)?)
}

/// Random full-rank state, Haar bases for both measurements and a Haar
/// unitary channel. Full support holds almost surely.
pub fn full_support_scenario<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<TpmExperiment, Error> {
    let rho = random_density_matrix(dim, rng)?;
    let first = random_basis(dim, rng)?;
    let u = linalg::haar_random_unitary(dim, rng)?;
    let second = random_basis(dim, rng)?;
    Ok(TpmExperiment::new(rho, first, quantum::channel_from_unitary(&u)?, second)?)
}

/// Gibbs state of a random H, energy eigenbases of H and a random H', and a
/// Haar unitary in between. Both spectra span [0, 1].
pub struct JarzynskiScenario {
    pub experiment: TpmExperiment,
    pub initial: GibbsEnsemble,
    pub last: GibbsEnsemble,
}

pub fn jarzynski_scenario<R: Rng + ?Sized>(dim: usize, beta: f64, rng: &mut R) -> Result<JarzynskiScenario, Error> {
    let h = random_hamiltonian(dim, rng)?;
    let h2 = random_hamiltonian(dim, rng)?;
    let u = linalg::haar_random_unitary(dim, rng)?;
    let initial = quantum::gibbs_ensemble(&h, beta)?;
    let last = quantum::gibbs_ensemble(&h2, beta)?;
    let experiment = TpmExperiment::new(
        initial.state().clone(),
        quantum::eigen_measurement(&h, None)?,
        quantum::channel_from_unitary(&u)?,
        quantum::eigen_measurement(&h2, None)?,
    )?;
    Ok(JarzynskiScenario { experiment, initial, last })
}
