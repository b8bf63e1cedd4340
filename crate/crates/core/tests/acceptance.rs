//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::OnceLock;

use num_complex::Complex64;
use rand::Rng;

use tpm_lab::batch;
use tpm_lab::linalg::{self, ComplexMatrix};
use tpm_lab::quantum::{self, ChannelKind, DensityMatrix, KrausChannel, ProjectorFamily, QuantumError};
use tpm_lab::random::{self, derive_seed, rng_from_seed};
use tpm_lab::sampler;
use tpm_lab::tpm::{self, JointDistribution, TpmExperiment};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

const DIMS: [usize; 5] = [2, 3, 4, 8, 16];
const PER_DIM: u64 = 100;

fn full_support_batch() -> &'static [(usize, JointDistribution)] {
    static BATCH: OnceLock<Vec<(usize, JointDistribution)>> = OnceLock::new();
    BATCH.get_or_init(build_full_support_batch)
}

fn build_full_support_batch() -> Vec<(usize, JointDistribution)> {
    let jobs: Vec<(usize, u64)> = DIMS.iter().flat_map(|&d| (0..PER_DIM).map(move |i| (d, i))).collect();
    batch::map(&jobs, |_, &(dim, i)| {
        let mut rng = rng_from_seed(derive_seed(dim as u64, i));
        let exp = random::full_support_scenario(dim, &mut rng).expect("scenario");
        (dim, tpm::joint_distribution(&exp).expect("joint"))
    })
}

fn random_non_unitary_channel(index: u64, dim: usize, rng: &mut impl Rng) -> KrausChannel {
    let p = rng.random::<f64>();
    let kind = match index % 3 {
        0 => ChannelKind::Dephasing { p },
        1 => ChannelKind::Depolarizing { p },
        _ if dim == 2 => ChannelKind::AmplitudeDamping { gamma: p },
        _ => ChannelKind::Dephasing { p },
    };
    quantum::standard_channel(kind, dim).expect("channel")
}

fn non_unitary_batch() -> Vec<JointDistribution> {
    let idx: Vec<u64> = (0..100).collect();
    batch::map(&idx, |_, &i| {
        let mut rng = rng_from_seed(derive_seed(0xdec0, i));
        // amplitude damping needs a qubit
        let dim = if i % 3 == 2 { 2 } else { 2 + (i % 4) as usize };
        let rho = random::random_density_matrix(dim, &mut rng).unwrap();
        let first = random::random_basis(dim, &mut rng).unwrap();
        let second = random::random_basis(dim, &mut rng).unwrap();
        let chan = random_non_unitary_channel(i, dim, &mut rng);
        tpm::joint_distribution(&TpmExperiment::new(rho, first, chan, second).unwrap()).unwrap()
    })
}

fn criterion_1() -> Outcome {
    let batch = full_support_batch();
    let mut worst = 0.0f64;
    for (dim, jd) in batch {
        ensure(jd.full_support(), || format!("dim {dim}: scenario lost full support"))?;
        let mi = tpm::mutual_information_table(jd);
        let dev = (mi.exp_average - 1.0).abs();
        ensure(dev <= 1e-8, || format!("dim {dim}: |<e^-I> - 1| = {dev:e}"))?;
        worst = worst.max(dev);
    }
    Ok(format!("{} full-support scenarios, max |<e^-I> - 1| = {worst:.2e}", batch.len()))
}

fn criterion_2() -> Outcome {
    let mut jds: Vec<JointDistribution> = full_support_batch().iter().map(|(_, jd)| jd.clone()).collect();
    jds.extend(non_unitary_batch());
    // Classical cases with missing support: identity channel, common basis.
    let mut rng = rng_from_seed(22);
    let mut closed_form = Vec::new();
    for dim in 2..=6 {
        let mut diag: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
        let s: f64 = diag.iter().sum();
        diag.iter_mut().for_each(|x| *x /= s);
        let rho = DensityMatrix::new(ComplexMatrix::diag(&diag).unwrap()).unwrap();
        let basis = ProjectorFamily::computational_basis(dim, None).unwrap();
        let chan = quantum::standard_channel(ChannelKind::Identity, dim).unwrap();
        let jd = tpm::joint_distribution(&TpmExperiment::new(rho, basis.clone(), chan, basis).unwrap()).unwrap();
        closed_form.push((diag.iter().map(|p| p * p).sum::<f64>(), tpm::mutual_information_table(&jd).exp_average));
        jds.push(jd);
    }
    let mut worst = 0.0f64;
    for jd in &jds {
        let mi = tpm::mutual_information_table(jd);
        worst = worst.max((mi.exp_average + mi.support_defect - 1.0).abs());
    }
    ensure(worst <= 1e-10, || format!("bookkeeping residual {worst:e}"))?;
    for (expect, got) in &closed_form {
        ensure((expect - got).abs() <= 1e-12, || format!("identity channel: {got} vs sum p^2 = {expect}"))?;
    }

    let rho = DensityMatrix::maximally_mixed(2).unwrap();
    let basis = ProjectorFamily::computational_basis(2, None).unwrap();
    let chan = quantum::standard_channel(ChannelKind::Identity, 2).unwrap();
    let jd = tpm::joint_distribution(&TpmExperiment::new(rho, basis.clone(), chan, basis).unwrap()).unwrap();
    let mi = tpm::mutual_information_table(&jd);
    ensure((mi.exp_average - 0.5).abs() <= 1e-12, || format!("qubit identity: {}", mi.exp_average))?;
    ensure((mi.support_defect - 0.5).abs() <= 1e-12, || format!("qubit defect: {}", mi.support_defect))?;
    Ok(format!("{} scenarios, max |<e^-I> + defect - 1| = {worst:.2e}; qubit identity gives 1/2", jds.len()))
}

fn criterion_3() -> Outcome {
    let mut min = f64::INFINITY;
    let mut count = 0;
    let unitary = full_support_batch().iter().map(|(_, jd)| jd.clone());
    for jd in unitary.chain(non_unitary_batch()) {
        let avg = tpm::mutual_information_table(&jd).average_mi;
        ensure(avg >= -1e-12, || format!("<I> = {avg:e}"))?;
        min = min.min(avg);
        count += 1;
    }
    Ok(format!("{count} scenarios (100 non-unitary channels), min <I> = {min:.2e}"))
}

fn criterion_4() -> Outcome {
    let idx: Vec<u64> = (0..100).collect();
    let defects = batch::map(&idx, |_, &i| {
        let mut rng = rng_from_seed(derive_seed(0x1a2, i));
        let beta = 0.1 + 9.9 * rng.random::<f64>();
        let dim = 2 + (i % 5) as usize;
        let s = random::jarzynski_scenario(dim, beta, &mut rng).unwrap();
        let jd = tpm::joint_distribution(&s.experiment).unwrap();
        let ws = tpm::jarzynski_check(&jd, &s.experiment, &s.initial, &s.last).unwrap();
        (beta, ws.jarzynski_defect)
    });
    let mut worst = 0.0f64;
    for (beta, d) in &defects {
        ensure(d.abs() <= 1e-8, || format!("beta {beta}: defect {d:e}"))?;
        worst = worst.max(d.abs());
    }

    // Qubit: H = diag(0, 1), H' = diag(0, 2), Hadamard evolution, β = 1.
    let h = ComplexMatrix::diag(&[0.0, 1.0]).unwrap();
    let h2 = ComplexMatrix::diag(&[0.0, 2.0]).unwrap();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let hadamard = ComplexMatrix::from_real_rows(&[vec![r, r], vec![r, -r]]).unwrap();
    let g = quantum::gibbs_ensemble(&h, 1.0).unwrap();
    let g2 = quantum::gibbs_ensemble(&h2, 1.0).unwrap();
    let exp = TpmExperiment::new(
        g.state().clone(),
        quantum::eigen_measurement(&h, None).unwrap(),
        quantum::channel_from_unitary(&hadamard).unwrap(),
        quantum::eigen_measurement(&h2, None).unwrap(),
    )
    .unwrap();
    let ws = tpm::jarzynski_check(&tpm::joint_distribution(&exp).unwrap(), &exp, &g, &g2).unwrap();
    let e1 = (-1.0f64).exp();
    let closed = (1.0 + (-2.0f64).exp()) / (1.0 + e1);
    ensure((ws.jarzynski_lhs - closed).abs() <= 1e-12, || format!("qubit lhs {} vs {closed}", ws.jarzynski_lhs))?;
    ensure((ws.jarzynski_rhs - closed).abs() <= 1e-12, || format!("qubit rhs {} vs {closed}", ws.jarzynski_rhs))?;
    Ok(format!("100 draws beta in [0.1, 10], max |defect| = {worst:.2e}; qubit = {closed:.12}"))
}

fn criterion_5() -> Outcome {
    let gamma = 0.5;
    let h = ComplexMatrix::diag(&[0.0, 1.0]).unwrap();
    let h2 = ComplexMatrix::diag(&[0.0, 2.0]).unwrap();
    let g = quantum::gibbs_ensemble(&h, 1.0).unwrap();
    let g2 = quantum::gibbs_ensemble(&h2, 1.0).unwrap();
    let exp = TpmExperiment::new(
        g.state().clone(),
        quantum::eigen_measurement(&h, None).unwrap(),
        quantum::standard_channel(ChannelKind::AmplitudeDamping { gamma }, 2).unwrap(),
        quantum::eigen_measurement(&h2, None).unwrap(),
    )
    .unwrap();
    let ws = tpm::jarzynski_check(&tpm::joint_distribution(&exp).unwrap(), &exp, &g, &g2).unwrap();

    // Kraus entries written out: K0 = diag(1, √(1−γ)), K1 = √γ |0⟩⟨1|.
    let kraus = [[[1.0, 0.0], [0.0, (1.0 - gamma).sqrt()]], [[0.0, gamma.sqrt()], [0.0, 0.0]]];
    let z = 1.0 + (-1.0f64).exp();
    let p = [1.0 / z, (-1.0f64).exp() / z];
    let (e, e2): ([f64; 2], [f64; 2]) = ([0.0, 1.0], [0.0, 2.0]);
    let mut lhs = 0.0f64;
    for n in 0..2 {
        for m in 0..2 {
            let cond: f64 = kraus.iter().map(|k: &[[f64; 2]; 2]| k[m][n] * k[m][n]).sum();
            lhs += p[n] * cond * (-(e2[m] - e[n])).exp();
        }
    }
    let rhs = (1.0 + (-2.0f64).exp()) / z;
    let defect = lhs - rhs;
    ensure(ws.jarzynski_defect.abs() > 1e-3, || format!("defect {} too small", ws.jarzynski_defect))?;
    ensure((ws.jarzynski_defect - defect).abs() <= 1e-12, || {
        format!("defect {} vs brute force {defect}", ws.jarzynski_defect)
    })?;
    let unital = exp.channel.unitality_residual();
    ensure(unital > 1e-3, || format!("unitality residual {unital}"))?;
    Ok(format!("gamma = 0.5 defect = {:.12} (brute force {defect:.12}), unitality {unital:.3}", ws.jarzynski_defect))
}

type Dense = Vec<Vec<Complex64>>;

fn dense(a: &ComplexMatrix) -> Dense {
    (0..a.rows()).map(|r| (0..a.cols()).map(|c| a.get(r, c)).collect()).collect()
}

fn mul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
}

fn adj(a: &Dense) -> Dense {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| a[j][i].conj()).collect()).collect()
}

fn tr(a: &Dense) -> f64 {
    (0..a.len()).map(|i| a[i][i].re).sum()
}

// Both forms of p(n,m), evaluated with plain nested loops.
fn factorization_oracle(exp: &TpmExperiment) -> f64 {
    let rho = dense(exp.initial_state.matrix());
    let kraus: Vec<Dense> = exp.channel.kraus_ops().iter().map(dense).collect();
    let mut worst = 0.0f64;
    for p in exp.first_measurement.projectors().iter().map(dense) {
        let p_n = tr(&mul(&p, &rho));
        let prp = mul(&mul(&p, &rho), &p);
        for q in exp.second_measurement.projectors().iter().map(dense) {
            let mut direct = 0.0;
            let mut factor = 0.0;
            for k in &kraus {
                direct += tr(&mul(&q, &mul(&mul(k, &prp), &adj(k))));
                factor += tr(&mul(&q, &mul(&mul(k, &p), &adj(k))));
            }
            worst = worst.max((direct - factor * p_n).abs());
        }
    }
    worst
}

fn criterion_6() -> Outcome {
    let mut worst_rank1 = 0.0f64;
    for (dim, jd) in full_support_batch().iter().filter(|(d, _)| *d <= 8) {
        let r = jd.factorization_residual();
        ensure(r <= 1e-12, || format!("dim {dim}: rank-1 residual {r:e}"))?;
        worst_rank1 = worst_rank1.max(r);
    }

    let mut rng = rng_from_seed(6);
    let mut p0 = ComplexMatrix::zeros(3, 3).unwrap();
    for k in 0..2 {
        let mut e = vec![Complex64::new(0.0, 0.0); 3];
        e[k] = Complex64::new(1.0, 0.0);
        p0 = &p0 + &ComplexMatrix::outer(&e, &e).unwrap();
    }
    let p1 = &ComplexMatrix::identity(3).unwrap() - &p0;
    let first = ProjectorFamily::new(vec![p0, p1], None).unwrap();
    let rho = random::random_density_matrix(3, &mut rng).unwrap();
    let comm = first.projectors()[0].matmul(rho.matrix()).distance(&rho.matrix().matmul(&first.projectors()[0]));
    ensure(comm > 1e-3, || format!("state commutes with P0 ({comm:e})"))?;
    let chan = quantum::channel_from_unitary(&linalg::haar_random_unitary(3, &mut rng).unwrap()).unwrap();
    let second = random::random_basis(3, &mut rng).unwrap();
    let exp = TpmExperiment::new(rho, first, chan, second).unwrap();
    let jd = tpm::joint_distribution(&exp).unwrap();
    let oracle = factorization_oracle(&exp);
    let r = jd.factorization_residual();
    ensure(r > 1e-3, || format!("rank-2 residual {r:e} not above 1e-3"))?;
    ensure((r - oracle).abs() <= 1e-12, || format!("rank-2 residual {r} vs oracle {oracle}"))?;
    Ok(format!("rank-1 max residual {worst_rank1:.2e}; rank-2 residual {r:.4} (oracle {oracle:.4})"))
}

fn mc_coverage(jd: &JointDistribution, weights: &tpm_lab::Table<f64>, exact: f64, base: u64) -> usize {
    let seeds: Vec<u64> = (0..100).map(|i| derive_seed(base, i)).collect();
    batch::map(&seeds, |_, &s| {
        let samples = sampler::sample_trajectories(jd, 100_000, &mut rng_from_seed(s)).unwrap();
        let rep = sampler::estimate_exponential_average(&samples, weights, Some(exact)).unwrap();
        rep.z_score.is_some_and(|z| z.abs() <= 3.0)
    })
    .into_iter()
    .filter(|&ok| ok)
    .count()
}

fn criterion_7() -> Outcome {
    let exp = random::full_support_scenario(3, &mut rng_from_seed(70)).unwrap();
    let jd = tpm::joint_distribution(&exp).unwrap();
    let mi = tpm::mutual_information_table(&jd);
    let hits_mi = mc_coverage(&jd, &mi.weight_table(), mi.exp_average, 71);
    ensure(hits_mi >= 95, || format!("e^-I: {hits_mi}/100 seeds within 3 sigma"))?;

    let s = random::jarzynski_scenario(3, 1.0, &mut rng_from_seed(72)).unwrap();
    let jd = tpm::joint_distribution(&s.experiment).unwrap();
    let ws = tpm::jarzynski_check(&jd, &s.experiment, &s.initial, &s.last).unwrap();
    let hits_w = mc_coverage(&jd, &ws.beta_work_table(), ws.jarzynski_rhs, 73);
    ensure(hits_w >= 95, || format!("e^-bW: {hits_w}/100 seeds within 3 sigma"))?;
    Ok(format!("10^5 samples: e^-I {hits_mi}/100, e^-bW vs Z'/Z {hits_w}/100 within 3 sigma"))
}

fn expect_invariant<T: std::fmt::Debug>(
    result: Result<T, QuantumError>,
    invariant: &str,
    label: &str,
) -> Result<(), String> {
    match result {
        Ok(v) => Err(format!("{label}: accepted {v:?}")),
        Err(e) => {
            let msg = e.to_string();
            ensure(e.invariant() == invariant && msg.contains(invariant), || {
                format!("{label}: expected `{invariant}`, got `{}` ({msg})", e.invariant())
            })?;
            ensure(msg.chars().any(|c| c.is_ascii_digit()), || format!("{label}: no residual in `{msg}`"))
        }
    }
}

fn criterion_8() -> Outcome {
    let m = |rows: &[&[f64]]| ComplexMatrix::from_real_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap();
    let non_herm = ComplexMatrix::from_parts(&[vec![0.5, 0.0], vec![0.0, 0.5]], &[vec![0.0, 0.1], vec![0.1, 0.0]]).unwrap();
    expect_invariant(DensityMatrix::new(non_herm), "hermitian", "non-Hermitian state")?;
    expect_invariant(DensityMatrix::new(m(&[&[0.6, 0.0], &[0.0, 0.6]])), "unit_trace", "trace 1.2")?;
    expect_invariant(DensityMatrix::new(m(&[&[1.2, 0.0], &[0.0, -0.2]])), "positive_semidefinite", "negative state")?;
    expect_invariant(ProjectorFamily::new(vec![m(&[&[0.5, 0.0], &[0.0, 0.0]]), m(&[&[0.5, 0.0], &[0.0, 1.0]])], None), "idempotent", "non-idempotent")?;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let plus = m(&[&[0.5, 0.5], &[0.5, 0.5]]);
    expect_invariant(ProjectorFamily::new(vec![m(&[&[1.0, 0.0], &[0.0, 0.0]]), plus], None), "orthogonal", "overlapping")?;
    expect_invariant(ProjectorFamily::new(vec![m(&[&[1.0, 0.0], &[0.0, 0.0]])], None), "completeness", "incomplete family")?;
    let c = (1.0 - 0.1 / 2f64.sqrt()).sqrt();
    let incomplete = KrausChannel::new(vec![ComplexMatrix::identity(2).unwrap().scale_real(c)]);
    expect_invariant(incomplete, "trace_preserving", "incomplete Kraus set")?;
    if let Err(QuantumError::NotTracePreserving { residual }) =
        KrausChannel::new(vec![ComplexMatrix::identity(2).unwrap().scale_real(c)])
    {
        ensure((residual - 0.1).abs() <= 1e-12, || format!("Kraus residual {residual} vs 0.1"))?;
    }
    expect_invariant(quantum::channel_from_unitary(&m(&[&[r, r], &[0.0, r]])), "unitary", "non-unitary")?;
    expect_invariant(quantum::gibbs_ensemble(&ComplexMatrix::diag(&[0.0, 1.0]).unwrap(), -1.0), "positive_beta", "negative beta")?;
    expect_invariant(quantum::gibbs_ensemble(&ComplexMatrix::diag(&[0.0, 1000.0]).unwrap(), 1.0), "exponent_guard", "overflow")?;

    let mut rng = rng_from_seed(8);
    for i in 0..100 {
        let dim = 1 + i % 8;
        let rho = random::random_density_matrix(dim, &mut rng).map_err(|e| format!("state: {e}"))?;
        ensure((rho.matrix().trace().re - 1.0).abs() <= 1e-10 && rho.min_eigenvalue() >= -1e-10, || "state residual".into())?;
        let fam = random::random_basis(dim, &mut rng).map_err(|e| format!("basis: {e}"))?;
        let sum = fam.projectors().iter().fold(ComplexMatrix::zeros(dim, dim).unwrap(), |acc, p| &acc + p);
        ensure(sum.distance(&ComplexMatrix::identity(dim).unwrap()) <= 1e-8, || "basis completeness".into())?;
        let u = linalg::haar_random_unitary(dim, &mut rng).unwrap();
        let chan = quantum::channel_from_unitary(&u).map_err(|e| format!("channel: {e}"))?;
        ensure(chan.completeness_residual() <= 1e-8, || "unitary channel completeness".into())?;
        let std = random_non_unitary_channel(i as u64, dim.max(2), &mut rng);
        ensure(std.completeness_residual() <= 1e-8, || "standard channel completeness".into())?;
        let h = random::random_hermitian(dim, 1.0, &mut rng).unwrap();
        let g = quantum::gibbs_ensemble(&h, 0.1 + 5.0 * rng.random::<f64>()).map_err(|e| format!("gibbs: {e}"))?;
        ensure((g.state().matrix().trace().re - 1.0).abs() <= 1e-10, || "gibbs trace".into())?;
    }
    Ok("11 invalid constructions rejected with invariant and residual; 100 random valid instances accepted".into())
}

fn criterion_9() -> Outcome {
    let mut rng = rng_from_seed(9);
    let step = 1e-5;
    let mut worst = 0.0f64;
    for i in 0..20 {
        let dim = 2 + i % 7;
        let h = random::random_hermitian(dim, 1.0, &mut rng).unwrap();
        let beta = 0.2 + 4.8 * rng.random::<f64>();
        let ln_z = |b: f64| quantum::gibbs_ensemble(&h, b).unwrap().ln_partition_function();
        let fd = -(ln_z(beta + step) - ln_z(beta - step)) / (2.0 * step);
        let energy = quantum::gibbs_ensemble(&h, beta).unwrap().mean_energy();
        let direct = quantum::gibbs_ensemble(&h, beta).unwrap().state().expectation(&h);
        ensure((energy - direct).abs() <= 1e-12, || format!("mean energy {energy} vs tr(rho H) {direct}"))?;
        let rel = (fd - energy).abs() / energy.abs();
        ensure(rel <= 1e-6, || format!("dim {dim} beta {beta}: -dlnZ/db {fd} vs {energy} (rel {rel:e})"))?;
        worst = worst.max(rel);
    }
    Ok(format!("20 Hamiltonians, max relative error {worst:.2e}"))
}

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_tpm-lab")
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(bin()).args(args).env("RUST_LOG", "off").output().expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn example(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples").join(format!("{name}.json"))
}

fn criterion_10() -> Outcome {
    let dir = std::env::temp_dir().join(format!("tpm-lab-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let mut examples: Vec<PathBuf> = std::fs::read_dir(Path::new(env!("CARGO_MANIFEST_DIR")).join("examples"))
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    examples.sort();
    for path in &examples {
        let p = path.to_str().unwrap();
        for cmd in [&["verify", "--config", p][..], &["sample", "--config", p, "--count", "500"][..]] {
            let (code, first) = run_cli(cmd);
            ensure(code == 0, || format!("{cmd:?} exited {code}"))?;
            let (_, second) = run_cli(cmd);
            ensure(first == second, || format!("{cmd:?} output differs between runs"))?;
        }
        let (_, out) = run_cli(&["verify", "--config", p]);
        let rows = tpm_lab::cli::report::read_rows_csv(std::str::from_utf8(&out).unwrap())?;
        ensure(rows.len() == 1 && rows[0].is_finite(), || format!("{p}: bad report"))?;
    }

    let hadamard = example("qubit_hadamard");
    let damping = example("qubit_amplitude_damping");
    let (pass, _) = run_cli(&["jarzynski", "--config", hadamard.to_str().unwrap()]);
    let (fail, _) = run_cli(&["jarzynski", "--config", damping.to_str().unwrap()]);
    let no_beta = dir.join("no_beta.json");
    std::fs::write(
        &no_beta,
        r#"{"name":"x","dim":2,"initial":{"kind":"gibbs"},"first_hamiltonian":{"kind":"diagonal","energies":[0,1]},"second_hamiltonian":{"kind":"diagonal","energies":[0,1]},"channel":{"kind":"identity"}}"#,
    )
    .map_err(|e| e.to_string())?;
    let (config, _) = run_cli(&["verify", "--config", no_beta.to_str().unwrap()]);
    let bad_state = dir.join("bad_state.json");
    std::fs::write(
        &bad_state,
        r#"{"name":"x","dim":2,"beta":1,"initial":{"kind":"explicit","matrix":{"re":[[0.6,0],[0,0.6]]}},"first_hamiltonian":{"kind":"diagonal","energies":[0,1]},"second_hamiltonian":{"kind":"diagonal","energies":[0,1]},"channel":{"kind":"identity"}}"#,
    )
    .map_err(|e| e.to_string())?;
    let (validation, _) = run_cli(&["verify", "--config", bad_state.to_str().unwrap()]);
    let _ = std::fs::remove_dir_all(&dir);
    let codes = [pass, fail, config, validation];
    ensure(codes == [0, 1, 2, 3], || format!("exit codes {codes:?}, expected [0, 1, 2, 3]"))?;
    Ok(format!("{} examples reproducible; exit codes pass/fail/config/validation = {codes:?}", examples.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("exponential average equals 1 on full support", criterion_1),
        ("support-defect bookkeeping", criterion_2),
        ("non-negative mutual information", criterion_3),
        ("Jarzynski equality for unitary evolution", criterion_4),
        ("Jarzynski defect for amplitude damping", criterion_5),
        ("factorization residual", criterion_6),
        ("Monte Carlo coverage", criterion_7),
        ("object validation", criterion_8),
        ("thermodynamic consistency", criterion_9),
        ("CLI contract", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS  criterion {:>2} {name}: {detail}", i + 1),
            Err(reason) => {
                failed += 1;
                println!("FAIL  criterion {:>2} {name}: {reason}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
