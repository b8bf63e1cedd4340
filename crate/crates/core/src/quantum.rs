//! Density matrices, projective measurements, Kraus channels and Gibbs
//! ensembles.
//!
//! Every constructor validates its invariants and fails with the name of the
//! violated invariant and the measured residual. Nothing is silently
//! renormalized.

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{self, ComplexMatrix, EigenDecomposition, LinalgError};

/// Largest allowed β·(E_max − E_min) when exponentiating a Hamiltonian.
pub const GIBBS_EXPONENT_GUARD: f64 = 700.0;

/// Validation thresholds used by the constructors in this module.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative Hermiticity tolerance for Hamiltonians.
    pub hermiticity: f64,
    /// Absolute tolerance on ‖ρ − ρ†‖_F, |tr ρ − 1| and the smallest eigenvalue of ρ.
    pub state: f64,
    /// Idempotency, orthogonality and completeness of projector families.
    pub projector: f64,
    /// How far tr P may sit from an integer.
    pub rank: f64,
    /// ‖Σ Λ†Λ − I‖_F for Kraus sets.
    pub completeness: f64,
    /// ‖U†U − I‖_F for unitaries.
    pub unitarity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermiticity: 1e-10,
            state: 1e-10,
            projector: 1e-10,
            rank: 1e-8,
            completeness: 1e-8,
            unitarity: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantumError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),

    #[error("invariant `hermitian` violated: residual {residual:.3e}")]
    NotHermitian { residual: f64 },

    #[error("invariant `unit_trace` violated: |tr - 1| = {residual:.3e}")]
    TraceNotUnity { residual: f64 },

    #[error("invariant `positive_semidefinite` violated: min eigenvalue {min_eigenvalue:.3e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("invariant `idempotent` violated for projector {index}: residual {residual:.3e}")]
    NotIdempotent { index: usize, residual: f64 },

    #[error("invariant `orthogonal` violated for projectors {first} and {second}: residual {residual:.3e}")]
    NotOrthogonal { first: usize, second: usize, residual: f64 },

    #[error("invariant `completeness` violated: residual {residual:.3e}")]
    Incomplete { residual: f64 },

    #[error("invariant `integer_rank` violated for projector {index}: trace {trace}")]
    NonIntegerRank { index: usize, trace: f64 },

    #[error("invariant `trace_preserving` violated: residual {residual:.3e}")]
    NotTracePreserving { residual: f64 },

    #[error("invariant `unitary` violated: residual {residual:.3e}")]
    NotUnitary { residual: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("empty {what}")]
    Empty { what: &'static str },

    #[error("energy list has {found} entries for {expected} projectors")]
    EnergyCount { expected: usize, found: usize },

    #[error("bad parameter {name} = {value}: must lie in [0, 1]")]
    BadParameter { name: &'static str, value: f64 },

    #[error("{channel} is only defined for dimension 2, got {dim}")]
    UnsupportedDimension { channel: &'static str, dim: usize },

    #[error("invariant `positive_beta` violated: beta = {beta}")]
    NonPositiveBeta { beta: f64 },

    #[error("invariant `exponent_guard` violated: beta * spread = {exponent:.3e} exceeds {guard}")]
    Overflow { exponent: f64, guard: f64 },
}

impl QuantumError {
    /// Short name of the violated invariant.
    pub fn invariant(&self) -> &'static str {
        match self {
            Self::Linalg(LinalgError::NotHermitian { .. }) | Self::NotHermitian { .. } => "hermitian",
            Self::Linalg(_) => "matrix",
            Self::TraceNotUnity { .. } => "unit_trace",
            Self::NotPositive { .. } => "positive_semidefinite",
            Self::NotIdempotent { .. } => "idempotent",
            Self::NotOrthogonal { .. } => "orthogonal",
            Self::Incomplete { .. } => "completeness",
            Self::NonIntegerRank { .. } => "integer_rank",
            Self::NotTracePreserving { .. } => "trace_preserving",
            Self::NotUnitary { .. } => "unitary",
            Self::DimensionMismatch { .. } => "dimension",
            Self::Empty { .. } => "nonempty",
            Self::EnergyCount { .. } => "energy_count",
            Self::BadParameter { .. } => "parameter_range",
            Self::UnsupportedDimension { .. } => "dimension",
            Self::NonPositiveBeta { .. } => "positive_beta",
            Self::Overflow { .. } => "exponent_guard",
        }
    }
}

pub type Result<T> = std::result::Result<T, QuantumError>;

fn check_square(m: &ComplexMatrix, dim: usize) -> Result<()> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare { rows: m.rows(), cols: m.cols() }.into());
    }
    if m.rows() != dim {
        return Err(QuantumError::DimensionMismatch { expected: dim, found: m.rows() });
    }
    Ok(())
}

/// Hermitian, positive semidefinite, unit-trace operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerances(matrix, &Tolerances::default())
    }

    pub fn with_tolerances(matrix: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        check_square(&matrix, matrix.rows())?;
        let residual = matrix.hermiticity_residual();
        if residual > tol.state {
            return Err(QuantumError::NotHermitian { residual });
        }
        let tr = matrix.trace();
        let residual = (tr - Complex64::new(1.0, 0.0)).norm();
        if residual > tol.state {
            return Err(QuantumError::TraceNotUnity { residual });
        }
        // Hermiticity already checked at absolute `tol.state`; the eigensolver
        // uses its own relative check which is looser for ‖ρ‖_F ≤ 1.
        let eig = linalg::hermitian_eig(&matrix, tol.state.max(tol.hermiticity))?;
        let min_eigenvalue = eig.eigenvalues[0];
        if min_eigenvalue < -tol.state {
            return Err(QuantumError::NotPositive { min_eigenvalue });
        }
        Ok(Self { matrix })
    }

    /// I/dim.
    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        let m = ComplexMatrix::identity(dim)?.scale_real(1.0 / dim as f64);
        Self::new(m)
    }

    /// |ψ⟩⟨ψ| for a normalized vector.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        Self::new(ComplexMatrix::outer(psi, psi)?)
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn min_eigenvalue(&self) -> f64 {
        linalg::hermitian_eig(&self.matrix, 1.0)
            .map(|e| e.eigenvalues[0])
            .unwrap_or(f64::NAN)
    }

    /// Re tr(ρ A).
    pub fn expectation(&self, a: &ComplexMatrix) -> f64 {
        self.matrix.matmul(a).trace().re
    }
}

/// Complete family of mutually orthogonal projectors, indexed by outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorFamily {
    dim: usize,
    projectors: Vec<ComplexMatrix>,
    ranks: Vec<usize>,
    energies: Option<Vec<f64>>,
}

impl ProjectorFamily {
    pub fn new(projectors: Vec<ComplexMatrix>, energies: Option<Vec<f64>>) -> Result<Self> {
        Self::with_tolerances(projectors, energies, &Tolerances::default())
    }

    pub fn with_tolerances(
        projectors: Vec<ComplexMatrix>,
        energies: Option<Vec<f64>>,
        tol: &Tolerances,
    ) -> Result<Self> {
        let first = projectors.first().ok_or(QuantumError::Empty { what: "projector family" })?;
        let dim = first.rows();
        for p in &projectors {
            check_square(p, dim)?;
        }
        if let Some(e) = &energies {
            if e.len() != projectors.len() {
                return Err(QuantumError::EnergyCount { expected: projectors.len(), found: e.len() });
            }
        }
        let mut ranks = Vec::with_capacity(projectors.len());
        for (index, p) in projectors.iter().enumerate() {
            let residual = p.hermiticity_residual();
            if residual > tol.projector {
                return Err(QuantumError::NotHermitian { residual });
            }
            let residual = p.matmul(p).distance(p);
            if residual > tol.projector {
                return Err(QuantumError::NotIdempotent { index, residual });
            }
            let trace = p.trace().re;
            let rank = trace.round();
            if (trace - rank).abs() > tol.rank || rank < 1.0 {
                return Err(QuantumError::NonIntegerRank { index, trace });
            }
            ranks.push(rank as usize);
        }
        for a in 0..projectors.len() {
            for b in (a + 1)..projectors.len() {
                let residual = projectors[a].matmul(&projectors[b]).frobenius_norm();
                if residual > tol.projector {
                    return Err(QuantumError::NotOrthogonal { first: a, second: b, residual });
                }
            }
        }
        let mut sum = ComplexMatrix::zeros(dim, dim)?;
        for p in &projectors {
            sum = &sum + p;
        }
        let residual = sum.distance(&ComplexMatrix::identity(dim)?);
        if residual > tol.projector {
            return Err(QuantumError::Incomplete { residual });
        }
        Ok(Self { dim, projectors, ranks, energies })
    }

    /// Rank-1 projectors onto the columns of a unitary.
    pub fn from_basis(u: &ComplexMatrix, energies: Option<Vec<f64>>) -> Result<Self> {
        if !u.is_square() {
            return Err(LinalgError::NotSquare { rows: u.rows(), cols: u.cols() }.into());
        }
        let projectors = (0..u.cols())
            .map(|k| {
                let v = u.column(k);
                ComplexMatrix::outer(&v, &v).map(|p| p.hermitian_part())
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Self::new(projectors, energies)
    }

    pub fn computational_basis(dim: usize, energies: Option<Vec<f64>>) -> Result<Self> {
        Self::from_basis(&ComplexMatrix::identity(dim)?, energies)
    }

    /// Same projectors, new energy labels.
    pub fn with_energies(mut self, energies: Vec<f64>) -> Result<Self> {
        if energies.len() != self.len() {
            return Err(QuantumError::EnergyCount { expected: self.len(), found: energies.len() });
        }
        self.energies = Some(energies);
        Ok(self)
    }

    /// tr(P_n H)/tr(P_n) for each projector.
    pub fn mean_energies(&self, h: &ComplexMatrix) -> Result<Vec<f64>> {
        check_square(h, self.dim)?;
        Ok(self
            .projectors
            .iter()
            .zip(&self.ranks)
            .map(|(p, &r)| p.matmul(h).trace().re / r as f64)
            .collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    pub fn labels(&self) -> std::ops::Range<usize> {
        0..self.projectors.len()
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn energies(&self) -> Option<&[f64]> {
        self.energies.as_deref()
    }

    pub fn is_rank_one(&self) -> bool {
        self.ranks.iter().all(|&r| r == 1)
    }
}

/// Groups the spectrum of `h` into energy eigenprojectors.
///
/// Consecutive sorted eigenvalues within `degeneracy_gap` (default
/// 1e−8·‖H‖_F) share a projector; its energy is the group mean.
pub fn eigen_measurement(h: &ComplexMatrix, degeneracy_gap: Option<f64>) -> Result<ProjectorFamily> {
    let eig = linalg::hermitian_eig(h, Tolerances::default().hermiticity)?;
    let gap = degeneracy_gap.unwrap_or(1e-8 * h.frobenius_norm());
    eigen_measurement_from(&eig, gap)
}

pub(crate) fn eigen_measurement_from(eig: &EigenDecomposition, gap: f64) -> Result<ProjectorFamily> {
    let n = eig.dim();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for k in 0..n {
        match groups.last_mut() {
            Some(g) if eig.eigenvalues[k] - eig.eigenvalues[k - 1] <= gap => g.push(k),
            _ => groups.push(vec![k]),
        }
    }
    let mut projectors = Vec::with_capacity(groups.len());
    let mut energies = Vec::with_capacity(groups.len());
    for g in &groups {
        let mut p = ComplexMatrix::zeros(n, n)?;
        for &k in g {
            let v = eig.eigenvectors.column(k);
            p = &p + &ComplexMatrix::outer(&v, &v)?;
        }
        projectors.push(p.hermitian_part());
        energies.push(g.iter().map(|&k| eig.eigenvalues[k]).sum::<f64>() / g.len() as f64);
    }
    ProjectorFamily::new(projectors, Some(energies))
}

/// Completely positive trace-preserving map X ↦ Σ_i Λ_i X Λ_i†.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    dim: usize,
    kraus_ops: Vec<ComplexMatrix>,
    completeness_residual: f64,
    unitality_residual: f64,
}

impl KrausChannel {
    pub fn new(kraus_ops: Vec<ComplexMatrix>) -> Result<Self> {
        Self::with_tolerances(kraus_ops, &Tolerances::default())
    }

    pub fn with_tolerances(kraus_ops: Vec<ComplexMatrix>, tol: &Tolerances) -> Result<Self> {
        let first = kraus_ops.first().ok_or(QuantumError::Empty { what: "Kraus operator list" })?;
        let dim = first.rows();
        for k in &kraus_ops {
            check_square(k, dim)?;
        }
        let identity = ComplexMatrix::identity(dim)?;
        let mut left = ComplexMatrix::zeros(dim, dim)?;
        let mut right = ComplexMatrix::zeros(dim, dim)?;
        for k in &kraus_ops {
            left = &left + &k.adjoint().matmul(k);
            right = &right + &k.matmul(&k.adjoint());
        }
        let completeness_residual = left.distance(&identity);
        if completeness_residual > tol.completeness {
            return Err(QuantumError::NotTracePreserving { residual: completeness_residual });
        }
        let unitality_residual = right.distance(&identity);
        Ok(Self { dim, kraus_ops, completeness_residual, unitality_residual })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus_ops(&self) -> &[ComplexMatrix] {
        &self.kraus_ops
    }

    /// ‖Σ Λ†Λ − I‖_F.
    pub fn completeness_residual(&self) -> f64 {
        self.completeness_residual
    }

    /// ‖Σ ΛΛ† − I‖_F; zero for unital channels.
    pub fn unitality_residual(&self) -> f64 {
        self.unitality_residual
    }

    /// Applies the map to an arbitrary operator of matching size.
    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(x.shape(), (self.dim, self.dim), "apply: dimension mismatch");
        let mut out = self.kraus_ops[0].conjugate(x);
        for k in &self.kraus_ops[1..] {
            out = &out + &k.conjugate(x);
        }
        out
    }
}

pub fn channel_from_unitary(u: &ComplexMatrix) -> Result<KrausChannel> {
    if !u.is_square() {
        return Err(LinalgError::NotSquare { rows: u.rows(), cols: u.cols() }.into());
    }
    let residual = u.unitarity_residual();
    if residual > Tolerances::default().unitarity {
        return Err(QuantumError::NotUnitary { residual });
    }
    KrausChannel::new(vec![u.clone()])
}

/// Stock channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelKind {
    Identity,
    /// ρ ↦ (1−p)ρ + p·diag(ρ) in the computational basis.
    Dephasing { p: f64 },
    /// ρ ↦ (1−p)ρ + p·I/dim.
    Depolarizing { p: f64 },
    /// Qubit decay |1⟩ → |0⟩ with probability γ.
    AmplitudeDamping { gamma: f64 },
}

fn check_unit_interval(name: &'static str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(QuantumError::BadParameter { name, value });
    }
    Ok(())
}

fn basis_op(dim: usize, row: usize, col: usize, amp: f64) -> Result<ComplexMatrix> {
    Ok(ComplexMatrix::from_fn(dim, dim, |r, c| {
        if r == row && c == col {
            Complex64::new(amp, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })?)
}

pub fn standard_channel(kind: ChannelKind, dim: usize) -> Result<KrausChannel> {
    let identity = ComplexMatrix::identity(dim)?;
    let ops = match kind {
        ChannelKind::Identity => vec![identity],
        ChannelKind::Dephasing { p } => {
            check_unit_interval("p", p)?;
            let mut ops = vec![identity.scale_real((1.0 - p).sqrt())];
            for k in 0..dim {
                ops.push(basis_op(dim, k, k, p.sqrt())?);
            }
            ops
        }
        ChannelKind::Depolarizing { p } => {
            check_unit_interval("p", p)?;
            let amp = (p / dim as f64).sqrt();
            let mut ops = vec![identity.scale_real((1.0 - p).sqrt())];
            for j in 0..dim {
                for k in 0..dim {
                    ops.push(basis_op(dim, j, k, amp)?);
                }
            }
            ops
        }
        ChannelKind::AmplitudeDamping { gamma } => {
            check_unit_interval("gamma", gamma)?;
            if dim != 2 {
                return Err(QuantumError::UnsupportedDimension { channel: "amplitude_damping", dim });
            }
            let k0 = ComplexMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, (1.0 - gamma).sqrt()]])?;
            let k1 = ComplexMatrix::from_real_rows(&[vec![0.0, gamma.sqrt()], vec![0.0, 0.0]])?;
            vec![k0, k1]
        }
    };
    KrausChannel::new(ops)
}

/// Channel output as a validated state.
pub fn apply_channel(chan: &KrausChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if chan.dim() != rho.dim() {
        return Err(QuantumError::DimensionMismatch { expected: chan.dim(), found: rho.dim() });
    }
    DensityMatrix::new(chan.apply(rho.matrix()))
}

/// Thermal state ρ = e^{−βH}/Z together with Z and F = −ln Z / β (k = 1).
#[derive(Debug, Clone)]
pub struct GibbsEnsemble {
    hamiltonian: ComplexMatrix,
    spectrum: EigenDecomposition,
    beta: f64,
    ln_partition_function: f64,
    partition_function: f64,
    free_energy: f64,
    state: DensityMatrix,
}

impl GibbsEnsemble {
    pub fn new(h: &ComplexMatrix, beta: f64) -> Result<Self> {
        if !beta.is_finite() || beta <= 0.0 {
            return Err(QuantumError::NonPositiveBeta { beta });
        }
        let spectrum = linalg::hermitian_eig(h, Tolerances::default().hermiticity)?;
        let e_min = spectrum.eigenvalues[0];
        let e_max = spectrum.eigenvalues[spectrum.dim() - 1];
        let exponent = beta * (e_max - e_min);
        if exponent > GIBBS_EXPONENT_GUARD {
            return Err(QuantumError::Overflow { exponent, guard: GIBBS_EXPONENT_GUARD });
        }
        let weights: Vec<f64> = spectrum.eigenvalues.iter().map(|&e| (-beta * (e - e_min)).exp()).collect();
        let shifted_z: f64 = weights.iter().sum();
        let ln_partition_function = shifted_z.ln() - beta * e_min;
        let partition_function = ln_partition_function.exp();
        if !partition_function.is_finite() || partition_function <= 0.0 {
            return Err(QuantumError::Overflow { exponent: -ln_partition_function, guard: GIBBS_EXPONENT_GUARD });
        }
        let free_energy = -ln_partition_function / beta;
        let populations: Vec<Complex64> = weights.iter().map(|w| Complex64::new(w / shifted_z, 0.0)).collect();
        let rho = spectrum.reconstruct_with(&populations).hermitian_part();
        let state = DensityMatrix::new(rho)?;
        Ok(Self {
            hamiltonian: h.clone(),
            spectrum,
            beta,
            ln_partition_function,
            partition_function,
            free_energy,
            state,
        })
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.hamiltonian
    }

    pub fn spectrum(&self) -> &EigenDecomposition {
        &self.spectrum
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn partition_function(&self) -> f64 {
        self.partition_function
    }

    pub fn ln_partition_function(&self) -> f64 {
        self.ln_partition_function
    }

    pub fn free_energy(&self) -> f64 {
        self.free_energy
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    /// tr(ρH).
    pub fn mean_energy(&self) -> f64 {
        self.state.expectation(&self.hamiltonian)
    }
}

pub fn gibbs_ensemble(h: &ComplexMatrix, beta: f64) -> Result<GibbsEnsemble> {
    GibbsEnsemble::new(h, beta)
}
