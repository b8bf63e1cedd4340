//! Exact two-point-measurement statistics.
//!
//! A [`TpmExperiment`] prepares a state, measures it with a first projector
//! family, evolves the post-measurement state through a Kraus channel and
//! measures a second projector family. [`joint_distribution`] evaluates the
//! Born-rule joint probabilities p(n,m); everything else in this module is a
//! function of that table:
//!
//! * [`mutual_information_table`] gives the single-trial mutual information
//!   I_nm = ln p(m|n) − ln p(m) and the exponential average ⟨e^{−I}⟩. The
//!   average equals Σ p(n)p(m) over the support, so pairs with vanishing
//!   probability leave a `support_defect` instead of NaNs.
//! * [`work_statistics`] reads the outcomes as energies and evaluates
//!   ⟨e^{−βW}⟩ against Z'/Z, with W = E'_m − E_n.
//! * [`compare_mi_to_dissipation`] measures how far I_nm sits from the
//!   dissipated work β(W − ΔF).
//!
//! All reductions are fixed-order loops over outcome indices, so results
//! are bit-identical however experiments are scheduled.

use serde::Serialize;
use thiserror::Error;

use crate::quantum::{DensityMatrix, GibbsEnsemble, KrausChannel, ProjectorFamily};
use crate::table::Table;

pub const DEFAULT_SUPPORT_EPSILON: f64 = 1e-12;

/// Slack allowed outside [0, 1] before a probability is rejected.
pub const PROBABILITY_SLACK: f64 = 1e-12;

/// Tolerance on the total mass of a joint table.
pub const NORMALIZATION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TpmError {
    #[error("dimension mismatch: {what} has dimension {found}, expected {expected}")]
    DimensionMismatch { what: &'static str, expected: usize, found: usize },

    #[error("probability p({n},{m}) = {value:.3e} lies outside [0, 1]")]
    ProbabilityOutOfRange { n: usize, m: usize, value: f64 },

    #[error("joint distribution sums to {total}, not 1")]
    NotNormalized { total: f64 },

    #[error("joint distribution is empty")]
    Empty,

    #[error("bad reference distribution: {reason}")]
    BadReference { reason: String },

    #[error("{what} has length {found}, expected {expected}")]
    LengthMismatch { what: &'static str, expected: usize, found: usize },

    #[error("bad parameter {name} = {value}")]
    BadParameters { name: &'static str, value: f64 },

    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch { left: (usize, usize), right: (usize, usize) },

    #[error("{which} measurement carries no energy labels")]
    MissingEnergies { which: &'static str },
}

pub type Result<T> = std::result::Result<T, TpmError>;

/// State, first measurement, channel, second measurement.
#[derive(Debug, Clone)]
pub struct TpmExperiment {
    pub initial_state: DensityMatrix,
    pub first_measurement: ProjectorFamily,
    pub channel: KrausChannel,
    pub second_measurement: ProjectorFamily,
}

impl TpmExperiment {
    pub fn new(
        initial_state: DensityMatrix,
        first_measurement: ProjectorFamily,
        channel: KrausChannel,
        second_measurement: ProjectorFamily,
    ) -> Result<Self> {
        let dim = initial_state.dim();
        for (what, found) in [
            ("first measurement", first_measurement.dim()),
            ("channel", channel.dim()),
            ("second measurement", second_measurement.dim()),
        ] {
            if found != dim {
                return Err(TpmError::DimensionMismatch { what, expected: dim, found });
            }
        }
        Ok(Self { initial_state, first_measurement, channel, second_measurement })
    }

    pub fn dim(&self) -> usize {
        self.initial_state.dim()
    }
}

/// Joint outcome statistics p(n,m) with marginals and conditionals.
#[derive(Debug, Clone, Serialize)]
pub struct JointDistribution {
    p_joint: Table<f64>,
    p_first: Vec<f64>,
    p_second: Vec<f64>,
    p_cond: Table<f64>,
    defined_rows: Vec<bool>,
    support_mask: Table<bool>,
    support_epsilon: f64,
    factorization_residual: f64,
    second_without_first: Option<Vec<f64>>,
}

impl JointDistribution {
    /// Validates a joint table and derives marginals and conditionals.
    ///
    /// Entries within [`PROBABILITY_SLACK`] of [0, 1] are clamped; the total
    /// must be 1 within [`NORMALIZATION_TOL`].
    pub fn from_table(raw: Table<f64>, support_epsilon: f64) -> Result<Self> {
        if raw.rows() == 0 || raw.cols() == 0 {
            return Err(TpmError::Empty);
        }
        if !(support_epsilon.is_finite() && support_epsilon >= 0.0) {
            return Err(TpmError::BadParameters { name: "support_epsilon", value: support_epsilon });
        }
        for (n, m, &value) in raw.iter() {
            if !(-PROBABILITY_SLACK..=1.0 + PROBABILITY_SLACK).contains(&value) {
                return Err(TpmError::ProbabilityOutOfRange { n, m, value });
            }
        }
        let p_joint = raw.map(|_, _, &v| v.clamp(0.0, 1.0));
        let total: f64 = p_joint.as_slice().iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(TpmError::NotNormalized { total });
        }
        let p_first = p_joint.row_sums();
        let p_second = p_joint.col_sums();
        let defined_rows: Vec<bool> = p_first.iter().map(|&p| p > support_epsilon).collect();
        let p_cond = p_joint.map(|n, _, &p| if defined_rows[n] { p / p_first[n] } else { 0.0 });
        let support_mask = p_joint.map(|_, _, &p| p > support_epsilon);
        Ok(Self {
            p_joint,
            p_first,
            p_second,
            p_cond,
            defined_rows,
            support_mask,
            support_epsilon,
            factorization_residual: 0.0,
            second_without_first: None,
        })
    }

    pub fn first_len(&self) -> usize {
        self.p_joint.rows()
    }

    pub fn second_len(&self) -> usize {
        self.p_joint.cols()
    }

    pub fn p_joint(&self) -> &Table<f64> {
        &self.p_joint
    }

    pub fn joint(&self, n: usize, m: usize) -> f64 {
        *self.p_joint.get(n, m)
    }

    /// p(n).
    pub fn p_first(&self) -> &[f64] {
        &self.p_first
    }

    /// p(m) = Σ_n p(n,m).
    pub fn p_second(&self) -> &[f64] {
        &self.p_second
    }

    /// p(m|n), or `None` when p(n) is below the support threshold.
    pub fn conditional(&self, n: usize, m: usize) -> Option<f64> {
        self.defined_rows[n].then(|| *self.p_cond.get(n, m))
    }

    /// Conditional table; rows with `row_defined(n) == false` are zero.
    pub fn p_cond(&self) -> &Table<f64> {
        &self.p_cond
    }

    pub fn row_defined(&self, n: usize) -> bool {
        self.defined_rows[n]
    }

    pub fn on_support(&self, n: usize, m: usize) -> bool {
        *self.support_mask.get(n, m)
    }

    pub fn support_mask(&self) -> &Table<bool> {
        &self.support_mask
    }

    pub fn full_support(&self) -> bool {
        self.support_mask.as_slice().iter().all(|&b| b)
    }

    pub fn support_epsilon(&self) -> f64 {
        self.support_epsilon
    }

    /// max_{n,m} |p(n,m) − tr{Q_m Λ(P_n)}·tr(P_n ρ)|; zero for tables built
    /// with [`JointDistribution::from_table`].
    pub fn factorization_residual(&self) -> f64 {
        self.factorization_residual
    }

    /// tr{Q_m Λ(ρ)}: second-outcome statistics had the first measurement not
    /// been performed. Differs from [`Self::p_second`] when ρ has coherences
    /// in the first basis.
    pub fn second_without_first(&self) -> Option<&[f64]> {
        self.second_without_first.as_deref()
    }

    /// Same statistics with the two measurements exchanged.
    pub fn transposed(&self) -> Result<Self> {
        Self::from_table(self.p_joint.transpose(), self.support_epsilon)
    }
}

/// Born-rule joint distribution with the default support threshold.
pub fn joint_distribution(exp: &TpmExperiment) -> Result<JointDistribution> {
    joint_distribution_with(exp, DEFAULT_SUPPORT_EPSILON)
}

/// p(n,m) = tr{Q_m Σ_i Λ_i P_n ρ P_n Λ_i† Q_m}.
pub fn joint_distribution_with(exp: &TpmExperiment, support_epsilon: f64) -> Result<JointDistribution> {
    let rho = exp.initial_state.matrix();
    let firsts = exp.first_measurement.projectors();
    let seconds = exp.second_measurement.projectors();

    let mut raw = Vec::with_capacity(firsts.len() * seconds.len());
    let mut factorized = Vec::with_capacity(raw.capacity());
    for p in firsts {
        let evolved = exp.channel.apply(&p.conjugate(rho));
        let evolved_projector = exp.channel.apply(p);
        let p_n = p.matmul(rho).trace().re;
        for q in seconds {
            raw.push(q.conjugate(&evolved).trace().re);
            factorized.push(q.matmul(&evolved_projector).trace().re * p_n);
        }
    }
    let raw = Table::from_vec(firsts.len(), seconds.len(), raw).expect("shape");
    let factorization_residual = raw
        .as_slice()
        .iter()
        .zip(&factorized)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    let mut jd = JointDistribution::from_table(raw, support_epsilon)?;
    jd.factorization_residual = factorization_residual;
    let evolved_state = exp.channel.apply(rho);
    jd.second_without_first = Some(seconds.iter().map(|q| q.matmul(&evolved_state).trace().re).collect());
    Ok(jd)
}

/// Single-trial mutual information and its exponential and plain averages.
#[derive(Debug, Clone, Serialize)]
pub struct MutualInformationTable {
    /// I_nm on the support, `None` elsewhere.
    pub i_table: Table<Option<f64>>,
    /// Σ over the support of p(n,m)·e^{−I_nm}.
    pub exp_average: f64,
    /// 1 − Σ over the support of p(n)p(m).
    pub support_defect: f64,
    /// Σ p(n,m) I_nm, the classical mutual information in nats.
    pub average_mi: f64,
}

impl MutualInformationTable {
    /// I_nm as plain numbers, NaN off the support.
    pub fn weight_table(&self) -> Table<f64> {
        self.i_table.map(|_, _, v| v.unwrap_or(f64::NAN))
    }
}

pub fn mutual_information_table(jd: &JointDistribution) -> MutualInformationTable {
    let (rows, cols) = jd.p_joint.shape();
    let mut exp_average = 0.0;
    let mut product_mass = 0.0;
    let mut average_mi = 0.0;
    let mut values = Vec::with_capacity(rows * cols);
    for n in 0..rows {
        for m in 0..cols {
            if !jd.on_support(n, m) {
                values.push(None);
                continue;
            }
            let joint = jd.joint(n, m);
            let cond = *jd.p_cond.get(n, m);
            let marginal = jd.p_second[m];
            let info = cond.ln() - marginal.ln();
            // p(n,m)·e^{−I} evaluated as p(n,m)·p(m)/p(m|n)
            exp_average += joint * marginal / cond;
            product_mass += jd.p_first[n] * marginal;
            average_mi += joint * info;
            values.push(Some(info));
        }
    }
    MutualInformationTable {
        i_table: Table::from_vec(rows, cols, values).expect("shape"),
        exp_average,
        support_defect: 1.0 - product_mass,
        average_mi,
    }
}

/// Σ over the support of p(n,m)·q(m)/p(m|n) for a reference distribution q.
pub fn exp_average_with_reference(jd: &JointDistribution, q: &[f64]) -> Result<f64> {
    if q.len() != jd.second_len() {
        return Err(TpmError::BadReference {
            reason: format!("length {} does not match {} outcomes", q.len(), jd.second_len()),
        });
    }
    if let Some((m, &v)) = q.iter().enumerate().find(|(_, v)| !v.is_finite() || **v < 0.0) {
        return Err(TpmError::BadReference { reason: format!("entry {m} is {v}") });
    }
    let total: f64 = q.iter().sum();
    if (total - 1.0).abs() > NORMALIZATION_TOL {
        return Err(TpmError::BadReference { reason: format!("entries sum to {total}") });
    }
    let mut acc = 0.0;
    for n in 0..jd.first_len() {
        for (m, &qm) in q.iter().enumerate() {
            if jd.on_support(n, m) {
                acc += jd.joint(n, m) * qm / *jd.p_cond.get(n, m);
            }
        }
    }
    Ok(acc)
}

/// Work statistics of an energy-labeled experiment.
#[derive(Debug, Clone, Serialize)]
pub struct WorkStatistics {
    /// W_nm = E'_m − E_n.
    pub work_table: Table<f64>,
    pub beta: f64,
    /// F' − F = −ln(Z'/Z)/β.
    pub delta_f: f64,
    /// Σ p(n,m) e^{−βW_nm}.
    pub jarzynski_lhs: f64,
    /// Z'/Z = e^{−βΔF}.
    pub jarzynski_rhs: f64,
    pub jarzynski_defect: f64,
    /// Σ_n p(m|n) over defined rows.
    pub conditional_colsums: Vec<f64>,
    /// β(W_nm − ΔF).
    pub dissipation_table: Table<f64>,
}

impl WorkStatistics {
    /// max_m |Σ_n p(m|n) − 1|.
    pub fn colsum_max_deviation(&self) -> f64 {
        self.conditional_colsums.iter().map(|s| (s - 1.0).abs()).fold(0.0, f64::max)
    }

    /// βW_nm, the exponent whose average estimates Z'/Z.
    pub fn beta_work_table(&self) -> Table<f64> {
        self.work_table.map(|_, _, &w| self.beta * w)
    }
}

pub fn work_statistics(
    jd: &JointDistribution,
    first_energies: &[f64],
    second_energies: &[f64],
    beta: f64,
    z: f64,
    z_prime: f64,
) -> Result<WorkStatistics> {
    if first_energies.len() != jd.first_len() {
        return Err(TpmError::LengthMismatch {
            what: "first energies",
            expected: jd.first_len(),
            found: first_energies.len(),
        });
    }
    if second_energies.len() != jd.second_len() {
        return Err(TpmError::LengthMismatch {
            what: "second energies",
            expected: jd.second_len(),
            found: second_energies.len(),
        });
    }
    for (name, value) in [("beta", beta), ("Z", z), ("Z'", z_prime)] {
        if !value.is_finite() || value <= 0.0 {
            return Err(TpmError::BadParameters { name, value });
        }
    }
    if let Some(&e) = first_energies.iter().chain(second_energies).find(|e| !e.is_finite()) {
        return Err(TpmError::BadParameters { name: "energy", value: e });
    }

    let work_table = Table::from_fn(jd.first_len(), jd.second_len(), |n, m| second_energies[m] - first_energies[n]);
    let jarzynski_rhs = z_prime / z;
    let delta_f = -jarzynski_rhs.ln() / beta;
    let mut jarzynski_lhs = 0.0;
    for (n, m, &w) in work_table.iter() {
        jarzynski_lhs += jd.joint(n, m) * (-beta * w).exp();
    }
    let mut conditional_colsums = vec![0.0; jd.second_len()];
    for n in (0..jd.first_len()).filter(|&n| jd.row_defined(n)) {
        for (s, c) in conditional_colsums.iter_mut().zip(jd.p_cond.row(n)) {
            *s += c;
        }
    }
    let dissipation_table = work_table.map(|_, _, &w| beta * (w - delta_f));
    Ok(WorkStatistics {
        work_table,
        beta,
        delta_f,
        jarzynski_lhs,
        jarzynski_rhs,
        jarzynski_defect: jarzynski_lhs - jarzynski_rhs,
        conditional_colsums,
        dissipation_table,
    })
}

/// [`work_statistics`] with energies taken from the measurement labels and
/// partition functions from the two ensembles.
pub fn jarzynski_check(
    jd: &JointDistribution,
    exp: &TpmExperiment,
    initial: &GibbsEnsemble,
    last: &GibbsEnsemble,
) -> Result<WorkStatistics> {
    if initial.beta() != last.beta() {
        return Err(TpmError::BadParameters { name: "final beta", value: last.beta() });
    }
    let first = exp.first_measurement.energies().ok_or(TpmError::MissingEnergies { which: "first" })?;
    let second = exp.second_measurement.energies().ok_or(TpmError::MissingEnergies { which: "second" })?;
    work_statistics(jd, first, second, initial.beta(), initial.partition_function(), last.partition_function())
}

/// max over the support of |I_nm − β(W_nm − ΔF)|.
pub fn compare_mi_to_dissipation(mi: &MutualInformationTable, ws: &WorkStatistics) -> Result<f64> {
    if mi.i_table.shape() != ws.dissipation_table.shape() {
        return Err(TpmError::ShapeMismatch { left: mi.i_table.shape(), right: ws.dissipation_table.shape() });
    }
    Ok(mi
        .i_table
        .iter()
        .filter_map(|(n, m, v)| v.map(|i| (i - ws.dissipation_table.get(n, m)).abs()))
        .fold(0.0, f64::max))
}
