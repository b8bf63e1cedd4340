//! Builds experiments from scenario configs and evaluates every statistic.

use log::warn;

use super::config::{ChannelSpec, HamiltonianSpec, MeasurementSpec, ScenarioConfig, StateSpec};
use super::report::ReportRow;
use crate::linalg::{self, ComplexMatrix};
use crate::quantum::{self, ChannelKind, DensityMatrix, GibbsEnsemble, KrausChannel, ProjectorFamily};
use crate::random::{self, derive_seed, rng_from_seed};
use crate::tpm::{self, JointDistribution, MutualInformationTable, TpmExperiment, WorkStatistics};
use crate::Error;

// Sub-stream indices for seeds derived from the scenario seed.
const FIRST_HAMILTONIAN_STREAM: u64 = 1;
const SECOND_HAMILTONIAN_STREAM: u64 = 2;
const CHANNEL_STREAM: u64 = 3;
const CHANNEL_HAMILTONIAN_STREAM: u64 = 4;
pub(crate) const SAMPLING_STREAM: u64 = 5;

/// Unitality residual above which a channel is reported as non-unital.
pub const UNITALITY_FLAG_TOL: f64 = 1e-10;

/// A fully built scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub beta: f64,
    pub experiment: TpmExperiment,
    pub initial_ensemble: GibbsEnsemble,
    pub final_ensemble: GibbsEnsemble,
    pub support_epsilon: f64,
}

/// Everything computed for one scenario.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub joint: JointDistribution,
    pub mutual_information: MutualInformationTable,
    pub work: WorkStatistics,
    pub mi_vs_dissipation_gap: f64,
    pub row: ReportRow,
}

fn build_hamiltonian(spec: &HamiltonianSpec, dim: usize, seed: u64, stream: u64) -> Result<ComplexMatrix, Error> {
    Ok(match spec {
        HamiltonianSpec::Diagonal { energies } => ComplexMatrix::diag(energies)?,
        HamiltonianSpec::Explicit { matrix } => matrix.to_matrix()?,
        HamiltonianSpec::Random { seed: explicit, scale } => {
            let mut rng = rng_from_seed(explicit.unwrap_or_else(|| derive_seed(seed, stream)));
            random::random_hermitian(dim, *scale, &mut rng)?
        }
    })
}

fn build_measurement(
    spec: &MeasurementSpec,
    h: &ComplexMatrix,
    config: &ScenarioConfig,
) -> Result<ProjectorFamily, Error> {
    let tol = config.tolerances.quantum();
    Ok(match spec {
        MeasurementSpec::Eigenbasis => {
            let gap = config.tolerances.degeneracy_gap * h.frobenius_norm();
            quantum::eigen_measurement(h, Some(gap))?
        }
        MeasurementSpec::Projectors { projectors, energies } => {
            let mats = projectors.iter().map(|p| p.to_matrix()).collect::<Result<Vec<_>, _>>()?;
            let family = ProjectorFamily::with_tolerances(mats, None, &tol)?;
            let energies = match energies {
                Some(e) => e.clone(),
                None => family.mean_energies(h)?,
            };
            family.with_energies(energies)?
        }
    })
}

fn build_channel(config: &ScenarioConfig, second: &ComplexMatrix) -> Result<KrausChannel, Error> {
    let dim = config.dim;
    let chan = match &config.channel {
        ChannelSpec::Identity => quantum::standard_channel(ChannelKind::Identity, dim)?,
        ChannelSpec::Dephasing { p } => quantum::standard_channel(ChannelKind::Dephasing { p: *p }, dim)?,
        ChannelSpec::Depolarizing { p } => quantum::standard_channel(ChannelKind::Depolarizing { p: *p }, dim)?,
        ChannelSpec::AmplitudeDamping { gamma } => {
            quantum::standard_channel(ChannelKind::AmplitudeDamping { gamma: *gamma }, dim)?
        }
        ChannelSpec::UnitaryFromHamiltonian { t, hamiltonian } => {
            let h = match hamiltonian {
                Some(spec) => build_hamiltonian(spec, dim, config.seed, CHANNEL_HAMILTONIAN_STREAM)?,
                None => second.clone(),
            };
            quantum::channel_from_unitary(&linalg::unitary_exp(&h, *t)?)?
        }
        ChannelSpec::HaarRandom { seed } => {
            let mut rng = rng_from_seed(seed.unwrap_or_else(|| derive_seed(config.seed, CHANNEL_STREAM)));
            quantum::channel_from_unitary(&linalg::haar_random_unitary(dim, &mut rng)?)?
        }
        ChannelSpec::Kraus { operators } => {
            let ops = operators.iter().map(|m| m.to_matrix()).collect::<Result<Vec<_>, _>>()?;
            KrausChannel::with_tolerances(ops, &config.tolerances.quantum())?
        }
    };
    Ok(chan)
}

impl Scenario {
    pub fn build(config: &ScenarioConfig) -> Result<Self, Error> {
        let dim = config.dim;
        let tol = config.tolerances.quantum();
        let h = build_hamiltonian(&config.first_hamiltonian, dim, config.seed, FIRST_HAMILTONIAN_STREAM)?;
        let h2 = build_hamiltonian(&config.second_hamiltonian, dim, config.seed, SECOND_HAMILTONIAN_STREAM)?;
        let initial_ensemble = quantum::gibbs_ensemble(&h, config.beta)?;
        let final_ensemble = quantum::gibbs_ensemble(&h2, config.beta)?;
        let state = match &config.initial {
            StateSpec::Gibbs => initial_ensemble.state().clone(),
            StateSpec::MaximallyMixed => DensityMatrix::maximally_mixed(dim)?,
            StateSpec::Explicit { matrix } => DensityMatrix::with_tolerances(matrix.to_matrix()?, &tol)?,
        };
        let first = build_measurement(&config.first_measurement, &h, config)?;
        let second = build_measurement(&config.second_measurement, &h2, config)?;
        let channel = build_channel(config, &h2)?;
        let experiment = TpmExperiment::new(state, first, channel, second)?;
        Ok(Self {
            name: config.name.clone(),
            beta: config.beta,
            experiment,
            initial_ensemble,
            final_ensemble,
            support_epsilon: config.tolerances.support_epsilon,
        })
    }

    pub fn evaluate(&self) -> Result<Evaluation, Error> {
        let joint = tpm::joint_distribution_with(&self.experiment, self.support_epsilon)?;
        let mutual_information = tpm::mutual_information_table(&joint);
        let work = tpm::jarzynski_check(&joint, &self.experiment, &self.initial_ensemble, &self.final_ensemble)?;
        let mi_vs_dissipation_gap = tpm::compare_mi_to_dissipation(&mutual_information, &work)?;
        let row = ReportRow {
            scenario: self.name.clone(),
            dim: self.experiment.dim(),
            beta: self.beta,
            exp_avg_mi: mutual_information.exp_average,
            support_defect: mutual_information.support_defect,
            avg_mi: mutual_information.average_mi,
            jarzynski_lhs: work.jarzynski_lhs,
            jarzynski_rhs: work.jarzynski_rhs,
            jarzynski_defect: work.jarzynski_defect,
            unitality_residual: self.experiment.channel.unitality_residual(),
            colsum_max_dev: work.colsum_max_deviation(),
            factorization_residual: joint.factorization_residual(),
            mi_vs_dissipation_gap,
        };
        Ok(Evaluation { joint, mutual_information, work, mi_vs_dissipation_gap, row })
    }

    /// Diagnostic flags for the log stream.
    pub fn flags(&self, eval: &Evaluation) -> Vec<String> {
        let mut flags = Vec::new();
        if !eval.joint.full_support() {
            flags.push(format!("NOT-FULL-SUPPORT: support_defect = {:.6e}", eval.mutual_information.support_defect));
        }
        let unitality = self.experiment.channel.unitality_residual();
        if unitality > UNITALITY_FLAG_TOL {
            flags.push(format!("NON-UNITAL: unitality_residual = {unitality:.6e}"));
        }
        for (which, fam) in [("first", &self.experiment.first_measurement), ("second", &self.experiment.second_measurement)] {
            if !fam.is_rank_one() {
                flags.push(format!("DEGENERATE-SPECTRUM: {which} measurement ranks {:?}", fam.ranks()));
            }
        }
        flags
    }

    pub fn log_flags(&self, eval: &Evaluation) {
        for flag in self.flags(eval) {
            warn!("[{}] {flag}", self.name);
        }
    }
}

pub(crate) fn sampling_seed(config: &ScenarioConfig) -> u64 {
    derive_seed(config.seed, SAMPLING_STREAM)
}
