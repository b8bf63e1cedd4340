//! JSON scenario files.
//!
//! ```json
//! {
//!   "name": "qubit_hadamard",
//!   "dim": 2,
//!   "beta": 1.0,
//!   "initial": { "kind": "gibbs" },
//!   "first_hamiltonian": { "kind": "diagonal", "energies": [0.0, 1.0] },
//!   "second_hamiltonian": { "kind": "diagonal", "energies": [0.0, 2.0] },
//!   "channel": { "kind": "kraus", "operators": [{ "re": [[0.7071, 0.7071], [0.7071, -0.7071]] }] },
//!   "first_measurement": { "kind": "eigenbasis" },
//!   "second_measurement": { "kind": "eigenbasis" },
//!   "seed": 7
//! }
//! ```
//!
//! Complex matrices are `{"re": [[..]], "im": [[..]]}` in row-major order;
//! `im` may be omitted for real matrices.

use serde::{Deserialize, Serialize};

use crate::linalg::ComplexMatrix;
use crate::quantum::Tolerances;
use crate::tpm::DEFAULT_SUPPORT_EPSILON;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSpec {
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

impl MatrixSpec {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let (re, im) = m.to_parts();
        Self { re, im: Some(im) }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.re.len(), self.re.first().map_or(0, Vec::len))
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix, crate::linalg::LinalgError> {
        match &self.im {
            Some(im) => ComplexMatrix::from_parts(&self.re, im),
            None => ComplexMatrix::from_real_rows(&self.re),
        }
    }

    fn check_square(&self, dim: usize, field: &str) -> Result<(), String> {
        let rows = self.re.len();
        let ragged = self.re.iter().any(|r| r.len() != dim);
        let im_bad = self
            .im
            .as_ref()
            .is_some_and(|im| im.len() != dim || im.iter().any(|r| r.len() != dim));
        if rows != dim || ragged || im_bad {
            return Err(format!("{field}: expected a {dim}x{dim} matrix"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    /// Gibbs state of the first Hamiltonian at the scenario β.
    Gibbs,
    MaximallyMixed,
    Explicit { matrix: MatrixSpec },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum HamiltonianSpec {
    Diagonal { energies: Vec<f64> },
    Explicit { matrix: MatrixSpec },
    /// (G + G†)/2 · scale for a Ginibre G; seed defaults to one derived from
    /// the scenario seed.
    Random {
        #[serde(default)]
        seed: Option<u64>,
        #[serde(default = "one")]
        scale: f64,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelSpec {
    Identity,
    Dephasing { p: f64 },
    Depolarizing { p: f64 },
    AmplitudeDamping { gamma: f64 },
    /// e^{−iHt}; H defaults to the second Hamiltonian.
    UnitaryFromHamiltonian {
        #[serde(default = "one")]
        t: f64,
        #[serde(default)]
        hamiltonian: Option<HamiltonianSpec>,
    },
    HaarRandom {
        #[serde(default)]
        seed: Option<u64>,
    },
    Kraus { operators: Vec<MatrixSpec> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasurementSpec {
    /// Energy eigenprojectors of the matching Hamiltonian.
    #[default]
    Eigenbasis,
    /// Explicit projectors; energies default to tr(PH)/tr(P).
    Projectors {
        projectors: Vec<MatrixSpec>,
        #[serde(default)]
        energies: Option<Vec<f64>>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioTolerances {
    pub hermiticity: f64,
    pub state: f64,
    pub projector: f64,
    pub rank: f64,
    pub completeness: f64,
    pub unitarity: f64,
    pub support_epsilon: f64,
    /// Relative gap for grouping degenerate eigenvalues, times ‖H‖_F.
    pub degeneracy_gap: f64,
    /// Pass threshold for `verify`.
    pub verify: f64,
    /// Pass threshold for `jarzynski`.
    pub jarzynski: f64,
}

impl Default for ScenarioTolerances {
    fn default() -> Self {
        let q = Tolerances::default();
        Self {
            hermiticity: q.hermiticity,
            state: q.state,
            projector: q.projector,
            rank: q.rank,
            completeness: q.completeness,
            unitarity: q.unitarity,
            support_epsilon: DEFAULT_SUPPORT_EPSILON,
            degeneracy_gap: 1e-8,
            verify: 1e-10,
            jarzynski: 1e-8,
        }
    }
}

impl ScenarioTolerances {
    pub fn quantum(&self) -> Tolerances {
        Tolerances {
            hermiticity: self.hermiticity,
            state: self.state,
            projector: self.projector,
            rank: self.rank,
            completeness: self.completeness,
            unitarity: self.unitarity,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub dim: usize,
    pub beta: f64,
    pub initial: StateSpec,
    pub first_hamiltonian: HamiltonianSpec,
    pub second_hamiltonian: HamiltonianSpec,
    pub channel: ChannelSpec,
    #[serde(default)]
    pub first_measurement: MeasurementSpec,
    #[serde(default)]
    pub second_measurement: MeasurementSpec,
    #[serde(default)]
    pub tolerances: ScenarioTolerances,
    #[serde(default)]
    pub seed: u64,
}

impl ScenarioConfig {
    /// Parses and validates; errors carry serde's line/column context or the
    /// offending field path.
    pub fn from_json(text: &str) -> Result<Self, String> {
        let config: Self = serde_json::from_str(text).map_err(|e| e.to_string())?;
        config.validate()?;
        Ok(config)
    }

    /// Shape and range checks that need no linear algebra.
    pub fn validate(&self) -> Result<(), String> {
        let dim = self.dim;
        if dim == 0 {
            return Err("dim: must be at least 1".into());
        }
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(format!("beta: must be positive and finite, got {}", self.beta));
        }
        if let StateSpec::Explicit { matrix } = &self.initial {
            matrix.check_square(dim, "initial.matrix")?;
        }
        check_hamiltonian(&self.first_hamiltonian, dim, "first_hamiltonian")?;
        check_hamiltonian(&self.second_hamiltonian, dim, "second_hamiltonian")?;
        match &self.channel {
            ChannelSpec::Dephasing { p } | ChannelSpec::Depolarizing { p } => unit_interval(*p, "channel.p")?,
            ChannelSpec::AmplitudeDamping { gamma } => {
                unit_interval(*gamma, "channel.gamma")?;
                if dim != 2 {
                    return Err(format!("channel: amplitude_damping needs dim 2, got {dim}"));
                }
            }
            ChannelSpec::UnitaryFromHamiltonian { t, hamiltonian } => {
                if !t.is_finite() {
                    return Err("channel.t: must be finite".into());
                }
                if let Some(h) = hamiltonian {
                    check_hamiltonian(h, dim, "channel.hamiltonian")?;
                }
            }
            ChannelSpec::Kraus { operators } => {
                if operators.is_empty() {
                    return Err("channel.operators: must not be empty".into());
                }
                for (i, op) in operators.iter().enumerate() {
                    op.check_square(dim, &format!("channel.operators[{i}]"))?;
                }
            }
            ChannelSpec::Identity | ChannelSpec::HaarRandom { .. } => {}
        }
        check_measurement(&self.first_measurement, dim, "first_measurement")?;
        check_measurement(&self.second_measurement, dim, "second_measurement")?;
        let t = &self.tolerances;
        for (name, v) in [
            ("hermiticity", t.hermiticity),
            ("state", t.state),
            ("projector", t.projector),
            ("rank", t.rank),
            ("completeness", t.completeness),
            ("unitarity", t.unitarity),
            ("support_epsilon", t.support_epsilon),
            ("degeneracy_gap", t.degeneracy_gap),
            ("verify", t.verify),
            ("jarzynski", t.jarzynski),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(format!("tolerances.{name}: must be non-negative, got {v}"));
            }
        }
        Ok(())
    }

    /// Whether every spec adapts to a change of `dim`.
    pub fn dimension_agnostic(&self) -> bool {
        let h_ok = |h: &HamiltonianSpec| matches!(h, HamiltonianSpec::Random { .. });
        matches!(self.initial, StateSpec::Gibbs | StateSpec::MaximallyMixed)
            && h_ok(&self.first_hamiltonian)
            && h_ok(&self.second_hamiltonian)
            && match &self.channel {
                ChannelSpec::Identity
                | ChannelSpec::Dephasing { .. }
                | ChannelSpec::Depolarizing { .. }
                | ChannelSpec::HaarRandom { .. } => true,
                ChannelSpec::UnitaryFromHamiltonian { hamiltonian, .. } => hamiltonian.as_ref().is_none_or(h_ok),
                ChannelSpec::AmplitudeDamping { .. } | ChannelSpec::Kraus { .. } => false,
            }
            && matches!(self.first_measurement, MeasurementSpec::Eigenbasis)
            && matches!(self.second_measurement, MeasurementSpec::Eigenbasis)
    }
}

fn unit_interval(v: f64, field: &str) -> Result<(), String> {
    if !(0.0..=1.0).contains(&v) {
        return Err(format!("{field}: must lie in [0, 1], got {v}"));
    }
    Ok(())
}

fn check_hamiltonian(h: &HamiltonianSpec, dim: usize, field: &str) -> Result<(), String> {
    match h {
        HamiltonianSpec::Diagonal { energies } => {
            if energies.len() != dim {
                return Err(format!("{field}.energies: expected {dim} values, got {}", energies.len()));
            }
            if energies.iter().any(|e| !e.is_finite()) {
                return Err(format!("{field}.energies: values must be finite"));
            }
        }
        HamiltonianSpec::Explicit { matrix } => matrix.check_square(dim, &format!("{field}.matrix"))?,
        HamiltonianSpec::Random { scale, .. } => {
            if !scale.is_finite() {
                return Err(format!("{field}.scale: must be finite"));
            }
        }
    }
    Ok(())
}

fn check_measurement(m: &MeasurementSpec, dim: usize, field: &str) -> Result<(), String> {
    if let MeasurementSpec::Projectors { projectors, energies } = m {
        if projectors.is_empty() {
            return Err(format!("{field}.projectors: must not be empty"));
        }
        for (i, p) in projectors.iter().enumerate() {
            p.check_square(dim, &format!("{field}.projectors[{i}]"))?;
        }
        if let Some(e) = energies {
            if e.len() != projectors.len() {
                return Err(format!("{field}.energies: expected {} values, got {}", projectors.len(), e.len()));
            }
        }
    }
    Ok(())
}
